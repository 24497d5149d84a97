/** Session console: one live session, editable statements, async runs with
 * polling, compatibility badge and staleness tracking. All state transitions
 * are confirmed by the service before the view updates. */
import {
  createSession,
  getCompatibility,
  getResults,
  getSession,
  pollResults,
  triggerRun,
  type ResultsEnvelope,
  type SessionView,
} from "./api.js";
import { StatementEditor } from "./editor.js";
import { epsilon } from "./format.js";
import { renderResults } from "./views.js";

export class SessionConsole {
  readonly root: HTMLElement;
  private badge: HTMLElement;
  private revisionNote: HTMLElement;
  private runButton: HTMLButtonElement;
  private resultsPane: HTMLElement;
  private editor: StatementEditor;
  private sessionId = "";
  private view: SessionView | null = null;

  constructor() {
    this.root = document.createElement("div");
    this.root.className = "console";
    const header = document.createElement("div");
    header.className = "header";
    this.badge = document.createElement("span");
    this.badge.className = "badge";
    this.badge.dataset.view = "badge";
    this.revisionNote = document.createElement("span");
    this.revisionNote.className = "revision";
    this.revisionNote.dataset.view = "revision";
    this.runButton = document.createElement("button");
    this.runButton.textContent = "recompute";
    this.runButton.addEventListener("click", () => void this.run());
    header.append(this.badge, this.revisionNote, this.runButton);
    this.editor = new StatementEditor({
      onMutated: (revision, epsilonStar) => {
        void this.afterMutation(revision, epsilonStar);
      },
    });
    this.resultsPane = document.createElement("div");
    this.resultsPane.className = "results";
    this.root.append(header, this.editor.root, this.resultsPane);
  }

  async open(sessionId: string): Promise<void> {
    this.sessionId = sessionId;
    await this.refreshView();
    const env = await getResults(this.sessionId);
    this.applyResults(env);
  }

  async create(problem: unknown): Promise<string> {
    const created = await createSession(problem);
    this.setBadge(created.epsilon_star, created.compatible);
    await this.open(created.id);
    return created.id;
  }

  private async refreshView(): Promise<void> {
    this.view = await getSession(this.sessionId);
    this.editor.bind(this.sessionId, this.view.statements);
    this.revisionNote.textContent = `revision ${this.view.revision}`;
    const comp = await getCompatibility(this.sessionId);
    this.setBadge(comp.epsilon_star, comp.compatible);
  }

  private setBadge(epsilonStar: number | null, compatible: boolean): void {
    this.badge.textContent = compatible
      ? `compatible (epsilon* = ${epsilon(epsilonStar)})`
      : `incompatible (epsilon* = ${epsilon(epsilonStar)})`;
    this.badge.className = compatible ? "badge ok" : "badge bad";
  }

  private async afterMutation(revision: number, epsilonStar: number | null): Promise<void> {
    this.revisionNote.textContent = `revision ${revision}`;
    if (epsilonStar !== null) {
      this.setBadge(epsilonStar, epsilonStar > 1e-6);
    }
    // results (if any) are now stale; re-render the flag from the service view
    const env = await getResults(this.sessionId);
    this.applyResults(env);
  }

  private async run(): Promise<void> {
    this.runButton.disabled = true;
    try {
      await triggerRun(this.sessionId);
      this.resultsPane.replaceChildren(spinner());
      const env = await pollResults(this.sessionId, 400);
      this.applyResults(env);
      await this.refreshView();
    } finally {
      this.runButton.disabled = false;
    }
  }

  applyResults(env: ResultsEnvelope): void {
    if (env.status === "none") {
      const note = document.createElement("p");
      note.dataset.view = "no-results";
      note.textContent = "no results yet; add statements and recompute";
      this.resultsPane.replaceChildren(note);
      return;
    }
    if (env.status === "running") {
      this.resultsPane.replaceChildren(spinner());
      return;
    }
    const doc = env.results;
    if ("error" in (doc as unknown as Record<string, unknown>)) {
      const note = document.createElement("p");
      note.className = "feedback error";
      note.dataset.view = "run-error";
      note.textContent = String((doc as unknown as { error: string }).error);
      this.resultsPane.replaceChildren(note);
      return;
    }
    renderResults(this.resultsPane, doc, env.stale);
  }
}

function spinner(): HTMLElement {
  const node = document.createElement("p");
  node.className = "spinner";
  node.dataset.view = "spinner";
  node.textContent = "computing…";
  return node;
}
