/** Statement editor: add/remove statements against the live session, surface
 * rejections (syntax errors, incompatible additions) inline without losing
 * the input. */
import { addStatement, ApiError, removeStatement, type SessionStatement, type StatementRejection } from "./api.js";
import { epsilon } from "./format.js";

export type EditorCallbacks = {
  onMutated: (revision: number, epsilonStar: number | null) => void;
};

export class StatementEditor {
  readonly root: HTMLElement;
  private list: HTMLUListElement;
  private input: HTMLInputElement;
  private feedback: HTMLElement;
  private sessionId = "";
  private statements: SessionStatement[] = [];

  constructor(private callbacks: EditorCallbacks) {
    this.root = document.createElement("div");
    this.root.className = "editor";
    this.list = document.createElement("ul");
    this.list.className = "statement-list";
    const form = document.createElement("form");
    this.input = document.createElement("input");
    this.input.type = "text";
    this.input.placeholder = "imp: g1 > g2   |   alt: a16 > a2   |   synergy: g1,g2";
    this.input.className = "statement-input";
    const button = document.createElement("button");
    button.type = "submit";
    button.textContent = "add statement";
    this.feedback = document.createElement("div");
    this.feedback.className = "feedback";
    this.feedback.dataset.view = "feedback";
    form.append(this.input, button);
    form.addEventListener("submit", (event) => {
      event.preventDefault();
      void this.submit();
    });
    this.root.append(this.list, form, this.feedback);
  }

  bind(sessionId: string, statements: SessionStatement[]): void {
    this.sessionId = sessionId;
    this.statements = [...statements];
    this.renderList();
  }

  private renderList(): void {
    this.list.replaceChildren();
    for (const statement of this.statements) {
      const item = document.createElement("li");
      item.dataset.statementId = String(statement.id);
      const text = document.createElement("code");
      text.textContent = statement.text;
      const remove = document.createElement("button");
      remove.type = "button";
      remove.textContent = "remove";
      remove.addEventListener("click", () => void this.remove(statement.id));
      item.append(text, remove);
      this.list.appendChild(item);
    }
  }

  private async submit(): Promise<void> {
    const text = this.input.value.trim();
    if (!text) return;
    this.feedback.textContent = "";
    this.feedback.className = "feedback";
    try {
      const res = await addStatement(this.sessionId, text);
      this.statements.push(res.statement);
      this.renderList();
      this.input.value = "";
      this.callbacks.onMutated(res.revision, res.epsilon_star);
    } catch (error) {
      this.showError(error);
    }
  }

  private async remove(statementId: number): Promise<void> {
    this.feedback.textContent = "";
    this.feedback.className = "feedback";
    try {
      const res = await removeStatement(this.sessionId, statementId);
      this.statements = this.statements.filter((s) => s.id !== statementId);
      this.renderList();
      this.callbacks.onMutated(res.revision, res.epsilon_star);
    } catch (error) {
      this.showError(error);
    }
  }

  private showError(error: unknown): void {
    this.feedback.className = "feedback error";
    if (error instanceof ApiError) {
      if (error.status === 409) {
        this.feedback.textContent = "a run is in flight; finish or wait before editing";
        return;
      }
      const detail = (error.body as { detail?: StatementRejection | string })?.detail;
      const body = (typeof detail === "object" && detail) || (error.body as StatementRejection);
      if (body && typeof body === "object" && "error" in body) {
        const eps = body.epsilon_star !== undefined ? ` (epsilon* = ${epsilon(body.epsilon_star ?? null)})` : "";
        const rows = body.suspect_rows?.length ? `; suspect: ${body.suspect_rows.join(", ")}` : "";
        this.feedback.textContent = `${body.error}${eps}${rows}`;
        return;
      }
      this.feedback.textContent = typeof detail === "string" ? detail : `request failed (${error.status})`;
      return;
    }
    this.feedback.textContent = "network error; the statement was not applied";
  }
}
