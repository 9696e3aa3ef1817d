// Tiny DOM helpers; enough for this dashboard, no framework needed.

export function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className = "",
  text = "",
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text) node.textContent = text;
  return node;
}

export function button(
  label: string,
  className: string,
  onClick: () => void,
): HTMLButtonElement {
  const node = el("button", className, label);
  node.addEventListener("click", onClick);
  return node;
}

export function formatTime(t: number): string {
  const sign = t < 0 ? "-" : "";
  const abs = Math.abs(t);
  const minutes = Math.floor(abs / 60);
  const seconds = abs - minutes * 60;
  return `${sign}${minutes}:${seconds.toFixed(1).padStart(4, "0")}`;
}
