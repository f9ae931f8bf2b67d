// Options page: where the service lives.

export const DEFAULT_SERVICE_URL = "http://127.0.0.1:8080";
const KEY = "serviceUrl";

function storage(): ChromeStorageArea | null {
  return typeof chrome !== "undefined" && chrome.storage ? chrome.storage.local : null;
}

export async function loadServiceUrl(): Promise<string> {
  const area = storage();
  if (!area) return DEFAULT_SERVICE_URL;
  const stored = await area.get(KEY);
  return stored[KEY] || DEFAULT_SERVICE_URL;
}

export async function saveServiceUrl(url: string): Promise<void> {
  const area = storage();
  if (area) await area.set({ [KEY]: url.trim() || DEFAULT_SERVICE_URL });
}

// DOM wiring, active only on the options page itself.
const input = typeof document !== "undefined"
  ? (document.getElementById("service-url") as HTMLInputElement | null)
  : null;
if (input) {
  void loadServiceUrl().then((url) => {
    input.value = url;
  });
  document.getElementById("save")?.addEventListener("click", () => {
    void saveServiceUrl(input.value).then(() => {
      const status = document.getElementById("status");
      if (status) status.textContent = "Saved.";
    });
  });
}
