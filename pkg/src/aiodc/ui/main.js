/** Browser entry point: mount the app against the same-origin service. */
import { ApiClient } from "./api.js";
import { App } from "./app.js";
const root = document.getElementById("app");
if (root) {
    void new App(root, new ApiClient("")).boot();
}
