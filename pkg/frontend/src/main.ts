import { el } from "./dom";
import { browserContext } from "./pages/context";
import { ComparePage } from "./pages/compare";
import { HomePage } from "./pages/home";
import { LayoutPage } from "./pages/layout";
import { parseRoute } from "./router";

interface ActivePage {
  renderFrame?(): void;
  destroy?(): void;
  el?: HTMLElement;
}

function start(): void {
  const root = document.getElementById("app");
  if (!root) throw new Error("missing #app container");
  const container: HTMLElement = root;
  const ctx = browserContext(container);

  let active: ActivePage | null = null;
  let raf = 0;

  const loop = () => {
    active?.renderFrame?.();
    raf = requestAnimationFrame(loop);
  };
  raf = requestAnimationFrame(loop);

  async function show(): Promise<void> {
    active?.destroy?.();
    active = null;
    const route = parseRoute(window.location.hash);
    switch (route.kind) {
      case "home":
        active = await HomePage.create(ctx);
        break;
      case "layout":
        active = await LayoutPage.create(ctx, route.sessionId, route.variant);
        break;
      case "compare":
        active = await ComparePage.create(ctx, route.a, route.b);
        break;
      default:
        container.replaceChildren(
          el("p", "error-text", `No such page: ${route.hash}`),
        );
    }
  }

  window.addEventListener("hashchange", () => void show());
  window.addEventListener("beforeunload", () => {
    cancelAnimationFrame(raf);
    active?.destroy?.();
  });
  void show();
}

start();
