export type Route =
  | { kind: "home" }
  | { kind: "layout"; sessionId: string; variant: 1 | 2 }
  | { kind: "compare"; a: string; b: string }
  | { kind: "unknown"; hash: string };

/** Hash routes: #/ . #/session/{id}/layout1 . #/session/{id}/layout2 .
 * #/compare?a={id}&b={id} */
export function parseRoute(hash: string): Route {
  const trimmed = hash.replace(/^#/, "") || "/";
  if (trimmed === "/" || trimmed === "") {
    return { kind: "home" };
  }
  const layout = trimmed.match(/^\/session\/([^/?]+)\/layout([12])$/);
  if (layout) {
    return {
      kind: "layout",
      sessionId: decodeURIComponent(layout[1]),
      variant: layout[2] === "2" ? 2 : 1,
    };
  }
  const compare = trimmed.match(/^\/compare\?(.*)$/);
  if (compare) {
    const params = new URLSearchParams(compare[1]);
    const a = params.get("a");
    const b = params.get("b");
    if (a && b) {
      return { kind: "compare", a, b };
    }
  }
  return { kind: "unknown", hash: trimmed };
}
