/** Browser entry point: boot the app against the same origin. */

import { ApiClient } from "./api.js";
import { createApp } from "./app.js";

const root = document.getElementById("app");
if (root) {
  const app = createApp(root, new ApiClient(""));
  void app.refresh();
}
