/** Wires the DOM view, the controller, and the toolbar inputs together. */
import { ApiClient } from "./api.js";
import { WorkbenchController } from "./controller.js";
import { rowsToFocal, type EditorRow } from "./model.js";
import { DomView } from "./view.js";

const SAMPLE_DOCUMENT = {
  variables: [
    { name: "a", frame: ["0", "1"] },
    { name: "b", frame: ["0", "1"] },
  ],
  beliefs: [
    {
      id: "m_a",
      scope: ["a"],
      focal: [
        { set: [{ a: "1" }], mass: 0.6 },
        { set: "*", mass: 0.4 },
      ],
    },
    {
      id: "m_ab",
      scope: ["a", "b"],
      focal: [
        {
          set: [
            { a: "1", b: "1" },
            { a: "0", b: "0" },
          ],
          mass: 0.7,
        },
        { set: "*", mass: 0.3 },
      ],
    },
  ],
};

function el(tag: string, className?: string, text?: string): HTMLElement {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function boot(): void {
  const app = document.getElementById("app");
  if (!app) throw new Error("missing #app element");

  const toolbar = el("div", "toolbar");
  app.appendChild(toolbar);

  const urlInput = document.createElement("input");
  urlInput.className = "base-url";
  urlInput.value = "http://127.0.0.1:8330";
  toolbar.appendChild(el("label", undefined, "service"));
  toolbar.appendChild(urlInput);

  const docArea = document.createElement("textarea");
  docArea.className = "document";
  docArea.rows = 10;
  docArea.value = JSON.stringify(SAMPLE_DOCUMENT, null, 2);
  app.appendChild(docArea);

  const loadBtn = el("button", "load", "load network") as HTMLButtonElement;
  toolbar.appendChild(loadBtn);

  const beliefSelect = document.createElement("select");
  beliefSelect.className = "belief-select";
  toolbar.appendChild(el("label", undefined, "belief"));
  toolbar.appendChild(beliefSelect);

  const stage = el("div", "stage");
  app.appendChild(stage);

  const view = new DomView(stage);
  let controller = makeController();

  function makeController(): WorkbenchController {
    const api = new ApiClient(urlInput.value, (input, init) => fetch(input, init));
    return new WorkbenchController(api, view);
  }

  view.editorCallbacks = {
    onMassInput(beliefId: string, rows: EditorRow[]): void {
      controller.editorChanged(beliefId, rows);
    },
    onPreview(beliefId: string, rows: EditorRow[]): void {
      void controller.previewEdit(beliefId, rowsToFocal(rows)).then(
        () => controller.refreshValidity(),
        (error) => view.showLoadError(String(error)),
      );
    },
    onCommit(beliefId: string, rows: EditorRow[]): void {
      void controller.commitEdit(beliefId, rowsToFocal(rows)).catch((error) => {
        view.showLoadError(String(error));
      });
    },
  };

  beliefSelect.addEventListener("change", () => {
    if (beliefSelect.value) controller.openEditor(beliefSelect.value);
  });

  loadBtn.addEventListener("click", () => {
    let parsed: unknown;
    try {
      parsed = JSON.parse(docArea.value);
    } catch {
      view.showLoadError("document is not valid JSON");
      return;
    }
    controller = makeController();
    void controller
      .loadNetwork(parsed as Parameters<WorkbenchController["loadNetwork"]>[0])
      .then((created) => {
        if (!created || !controller.document) return;
        beliefSelect.textContent = "";
        for (const belief of controller.document.beliefs) {
          const option = document.createElement("option");
          option.value = belief.id;
          option.textContent = belief.id;
          beliefSelect.appendChild(option);
        }
        if (controller.document.beliefs.length > 0) {
          beliefSelect.value = controller.document.beliefs[0].id;
          controller.openEditor(beliefSelect.value);
        }
      });
  });
}

boot();
