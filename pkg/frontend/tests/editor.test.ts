import { beforeEach, describe, expect, it, vi } from "vitest";

import { StatementEditor } from "../src/editor.js";

function jsonResponse(status: number, body: unknown): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

describe("statement editor", () => {
  let editor: StatementEditor;
  let mutations: Array<{ revision: number; epsilonStar: number | null }>;

  beforeEach(() => {
    mutations = [];
    editor = new StatementEditor({
      onMutated: (revision, epsilonStar) => mutations.push({ revision, epsilonStar }),
    });
    editor.bind("s1", [{ id: 1, text: "imp: g1 > g2" }]);
    document.body.replaceChildren(editor.root);
  });

  function input(): HTMLInputElement {
    return editor.root.querySelector("input")!;
  }

  function submit(): Promise<void> {
    editor.root.querySelector("form")!.dispatchEvent(new Event("submit"));
    return vi.waitFor(() => Promise.resolve());
  }

  it("adds an accepted statement and reports the new revision", async () => {
    const fetchMock = vi.fn().mockResolvedValue(
      jsonResponse(200, { revision: 2, statement: { id: 7, text: "alt: a16 > a2" }, epsilon_star: 0.1 }),
    );
    vi.stubGlobal("fetch", fetchMock);
    input().value = "alt: a16 > a2";
    await submit();
    await vi.waitFor(() => expect(mutations.length).toBe(1));
    expect(fetchMock).toHaveBeenCalledWith("/sessions/s1/statements", expect.objectContaining({
      method: "POST",
      body: JSON.stringify({ statement: "alt: a16 > a2" }),
    }));
    expect(mutations[0]).toEqual({ revision: 2, epsilonStar: 0.1 });
    const items = editor.root.querySelectorAll("li");
    expect(items.length).toBe(2);
    expect(items[1].querySelector("code")!.textContent).toBe("alt: a16 > a2");
    expect(input().value).toBe("");
  });

  it("surfaces an incompatible addition with epsilon* and keeps the input", async () => {
    vi.stubGlobal("fetch", vi.fn().mockResolvedValue(jsonResponse(422, {
      error: "statement leaves no compatible model",
      statement: "imp: g2 > g1",
      epsilon_star: 0.0,
      suspect_rows: [],
    })));
    input().value = "imp: g2 > g1";
    await submit();
    const feedback = editor.root.querySelector('[data-view="feedback"]')!;
    await vi.waitFor(() => expect(feedback.textContent).toContain("no compatible model"));
    expect(feedback.textContent).toContain("epsilon* = 0.0000");
    expect(feedback.className).toContain("error");
    expect(mutations.length).toBe(0);
    expect(input().value).toBe("imp: g2 > g1");
    expect(editor.root.querySelectorAll("li").length).toBe(1);
  });

  it("explains 409 while a run is in flight", async () => {
    vi.stubGlobal("fetch", vi.fn().mockResolvedValue(jsonResponse(409, { detail: "a run is in flight" })));
    input().value = "alt: a1 >= a2";
    await submit();
    const feedback = editor.root.querySelector('[data-view="feedback"]')!;
    await vi.waitFor(() => expect(feedback.textContent).toContain("run is in flight"));
  });

  it("removes a statement via the service and updates the list", async () => {
    vi.stubGlobal("fetch", vi.fn().mockResolvedValue(jsonResponse(200, { revision: 2, epsilon_star: 1.0 })));
    editor.root.querySelector("li button")!.dispatchEvent(new Event("click"));
    await vi.waitFor(() => expect(mutations.length).toBe(1));
    expect(mutations[0].epsilonStar).toBe(1.0);
    expect(editor.root.querySelectorAll("li").length).toBe(0);
  });

  it("reports network failures without dropping statements", async () => {
    vi.stubGlobal("fetch", vi.fn().mockRejectedValue(new TypeError("offline")));
    input().value = "alt: a1 >= a2";
    await submit();
    const feedback = editor.root.querySelector('[data-view="feedback"]')!;
    await vi.waitFor(() => expect(feedback.textContent).toContain("network error"));
    expect(editor.root.querySelectorAll("li").length).toBe(1);
  });
});
