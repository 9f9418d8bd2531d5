export * from "./api.js";
export * from "./transform.js";
export * from "./viewModel.js";
export * from "./render.js";
export * from "./app.js";
