// Page bootstrap. All wiring funnels through createApp so tests can inject a
// document, a server base, and a socket factory; the browser path at the
// bottom runs with defaults.

import { bindKeyboard } from "./keymap.js";
import { ViewModel } from "./model.js";
import { SessionClient, type ConnectionStatus, type SocketFactory } from "./net.js";
import { collectRefs, render, type Refs } from "./render.js";

export interface AppOptions {
  doc: Document;
  base: string;
  factory?: SocketFactory;
  savePlan?: (text: string) => void;
}

export interface App {
  vm: ViewModel;
  client: SessionClient;
  refs: Refs;
  start(taskYaml?: string): Promise<void>;
  stop(): void;
  rerender(): void;
}

export function serverBase(loc: Location): string {
  const override = new URLSearchParams(loc.search).get("server");
  return override ?? loc.origin;
}

function blobSave(doc: Document, text: string): void {
  const blob = new Blob([text], { type: "text/plain" });
  const url = URL.createObjectURL(blob);
  const anchor = doc.createElement("a");
  anchor.href = url;
  anchor.download = "session.plan";
  anchor.click();
  URL.revokeObjectURL(url);
}

export function createApp(options: AppOptions): App {
  const { doc, base } = options;
  const vm = new ViewModel();
  const refs = collectRefs(doc);
  let status: ConnectionStatus = "idle";
  const rerender = (): void => render(vm, refs, status);

  const client = new SessionClient(
    base,
    {
      onState: (message) => {
        vm.applyState(message);
        rerender();
      },
      onServerError: (message) => {
        vm.applyError(message);
        rerender();
      },
      onStatus: (next) => {
        status = next;
        rerender();
      },
      onFault: (error) => {
        vm.pushToast(error.message);
        rerender();
      },
    },
    options.factory,
  );

  const dispatch = (command: string): void => {
    if (vm.state === null || vm.pending) return;
    vm.pending = true;
    try {
      client.send(command);
    } catch (error) {
      vm.pending = false;
      vm.pushToast((error as Error).message);
      rerender();
    }
  };

  const detachKeys = bindKeyboard(doc, {
    context: () => ({ applicable: vm.applicable(), selectedType: vm.selectedType }),
    dispatch,
  });

  refs.layerSlider.addEventListener("input", () => {
    vm.selectLayer(Number(refs.layerSlider.value));
    rerender();
  });
  refs.followButton.addEventListener("click", () => {
    vm.followAgentLayer();
    rerender();
  });
  refs.palette.addEventListener("click", (ev) => {
    const type = (ev.target as HTMLElement).dataset?.type;
    if (type !== undefined) {
      vm.selectType(type);
      rerender();
    }
  });
  refs.toasts.addEventListener("click", (ev) => {
    const target = ev.target as HTMLElement;
    if (!target.classList.contains("toast-dismiss")) return;
    const holder = target.closest(".toast") as HTMLElement | null;
    if (holder?.dataset.toastId !== undefined) {
      vm.dismissToast(Number(holder.dataset.toastId));
      rerender();
    }
  });
  const savePlan = options.savePlan ?? ((text: string) => blobSave(doc, text));
  refs.downloadButton.addEventListener("click", () => {
    client
      .fetchPlan()
      .then(savePlan)
      .catch((error: Error) => {
        vm.pushToast(error.message);
        rerender();
      });
  });

  return {
    vm,
    client,
    refs,
    async start(taskYaml?: string): Promise<void> {
      const message = await client.createSession(taskYaml);
      vm.applyState(message);
      client.connect();
      rerender();
    },
    stop(): void {
      detachKeys();
      client.close();
    },
    rerender,
  };
}

async function browserMain(): Promise<void> {
  const app = createApp({ doc: document, base: serverBase(window.location) });
  const upload = document.getElementById("task-file") as HTMLInputElement | null;
  upload?.addEventListener("change", () => {
    const file = upload.files?.[0];
    if (file === undefined) return;
    file.text().then((yaml) => {
      app.client.close();
      app.start(yaml).catch((error: Error) => {
        app.vm.pushToast(error.message);
        app.rerender();
      });
    });
  });
  try {
    await app.start();
  } catch (error) {
    app.vm.pushToast((error as Error).message);
    app.rerender();
  }
}

// Only self-start on a page that carries the UI shell.
if (typeof document !== "undefined" && document.getElementById("grid") !== null) {
  void browserMain();
}
