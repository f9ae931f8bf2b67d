// Content script: hands the current selection (or page text) to the popup.
// Kept import-free so it loads as a classic script.

function collapseWhitespace(text: string): string {
  return text.replace(/\s+/g, " ").trim();
}

chrome.runtime.onMessage.addListener((message, _sender, sendResponse) => {
  if (message?.type === "GET_SELECTION") {
    sendResponse({
      selection: collapseWhitespace(window.getSelection()?.toString() ?? ""),
    });
  } else if (message?.type === "GET_PAGE_TEXT") {
    sendResponse({ text: collapseWhitespace(document.body?.innerText ?? "") });
  }
});
