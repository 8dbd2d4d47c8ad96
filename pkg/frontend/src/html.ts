/** Small DOM helpers shared by the views. */

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;")
    .replace(/'/g, "&#39;");
}

/** Build a detached element from an HTML string (single root). */
export function el(html: string): HTMLElement {
  const template = document.createElement("template");
  template.innerHTML = html.trim();
  const node = template.content.firstElementChild;
  if (!node) throw new Error("el() needs one root element");
  return node as HTMLElement;
}

export function query<T extends HTMLElement>(
  root: ParentNode,
  selector: string,
): T {
  const node = root.querySelector(selector);
  if (!node) throw new Error(`missing element: ${selector}`);
  return node as T;
}

export function queryAll<T extends HTMLElement>(
  root: ParentNode,
  selector: string,
): T[] {
  return Array.from(root.querySelectorAll(selector)) as T[];
}

export function option(value: string, text = value): string {
  return `<option value="${escapeHtml(value)}">${escapeHtml(text)}</option>`;
}
