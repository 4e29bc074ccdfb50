import { ServiceClient } from "./api.js";
import { bootstrap } from "./main.js";

const root = document.getElementById("app");
if (root) {
  bootstrap(root, new ServiceClient()).catch((error) => {
    console.error("player failed to start", error);
  });
}
