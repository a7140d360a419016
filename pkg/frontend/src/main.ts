import { TutorClient } from "./api";
import { TutorApp } from "./app";

// Browser entry point: ?base=…&student=…&condition=Control|GPP, or
// ?session=… to re-attach after a reload.
export async function boot(root: HTMLElement): Promise<TutorApp> {
  const params = new URLSearchParams(window.location.search);
  const base = params.get("base") ?? "http://127.0.0.1:8000";
  const app = new TutorApp(root, new TutorClient(base));
  const existing = params.get("session");
  if (existing) {
    await app.attach(existing);
  } else {
    const condition = params.get("condition") === "Control" ? "Control" : "GPP";
    await app.start(params.get("student") ?? "anonymous", condition);
    const url = new URL(window.location.href);
    url.searchParams.set("session", app.sessionId);
    window.history.replaceState(null, "", url);
  }
  return app;
}

const mount = document.getElementById("app");
if (mount) {
  boot(mount).catch((err) => {
    mount.textContent = `failed to start: ${err}`;
  });
}
