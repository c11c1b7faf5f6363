// Browser entry point: dial the session server that served this page
// and hand the board over to the controller.

import { SessionConnection } from "./connection.js";
import { TraineeApp } from "./app.js";

const root = document.getElementById("app");
if (root === null) {
  throw new Error("missing #app element");
}

const wsUrl = `${location.protocol === "https:" ? "wss" : "ws"}://${location.host}/ws`;
const connection = new SessionConnection(() => new WebSocket(wsUrl));
const app = new TraineeApp(connection, root, { pollMs: 500 });
app.start();

window.addEventListener("beforeunload", () => app.stop());
