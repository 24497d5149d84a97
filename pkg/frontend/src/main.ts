/** Bootstrap: open the newest session or offer a problem-file upload. */
import { listSessions } from "./api.js";
import { SessionConsole } from "./app.js";

async function boot(): Promise<void> {
  const mount = document.getElementById("app");
  if (!mount) throw new Error("missing #app mount point");
  const console_ = new SessionConsole();

  const picker = document.createElement("div");
  picker.className = "picker";
  const file = document.createElement("input");
  file.type = "file";
  file.accept = "application/json";
  const hint = document.createElement("span");
  hint.textContent = "upload a problem file to start a session";
  picker.append(hint, file);
  file.addEventListener("change", async () => {
    const chosen = file.files?.[0];
    if (!chosen) return;
    const problem = JSON.parse(await chosen.text());
    await console_.create(problem);
    hint.textContent = `session for ${chosen.name}`;
  });

  mount.append(picker, console_.root);

  const sessions = await listSessions().catch(() => []);
  if (sessions.length > 0) {
    const latest = sessions[sessions.length - 1];
    await console_.open(latest.id);
    hint.textContent = `resumed session ${latest.id}`;
  }
}

void boot();
