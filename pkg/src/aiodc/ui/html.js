/** Small DOM helpers shared by the views. */
export function escapeHtml(text) {
    return text
        .replace(/&/g, "&amp;")
        .replace(/</g, "&lt;")
        .replace(/>/g, "&gt;")
        .replace(/"/g, "&quot;")
        .replace(/'/g, "&#39;");
}
/** Build a detached element from an HTML string (single root). */
export function el(html) {
    const template = document.createElement("template");
    template.innerHTML = html.trim();
    const node = template.content.firstElementChild;
    if (!node)
        throw new Error("el() needs one root element");
    return node;
}
export function query(root, selector) {
    const node = root.querySelector(selector);
    if (!node)
        throw new Error(`missing element: ${selector}`);
    return node;
}
export function queryAll(root, selector) {
    return Array.from(root.querySelectorAll(selector));
}
export function option(value, text = value) {
    return `<option value="${escapeHtml(value)}">${escapeHtml(text)}</option>`;
}
