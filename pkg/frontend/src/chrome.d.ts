// Minimal typings for the extension APIs this project touches.

interface ChromeTab {
  id?: number;
  url?: string;
}

interface ChromeRuntime {
  onMessage: {
    addListener(
      handler: (
        message: any,
        sender: unknown,
        sendResponse: (response?: any) => void,
      ) => boolean | void,
    ): void;
  };
  lastError?: { message?: string };
}

interface ChromeTabs {
  query(info: { active: boolean; currentWindow: boolean }): Promise<ChromeTab[]>;
  sendMessage(tabId: number, message: any): Promise<any>;
}

interface ChromeStorageArea {
  get(keys: string | string[]): Promise<Record<string, any>>;
  set(items: Record<string, any>): Promise<void>;
}

declare const chrome: {
  runtime: ChromeRuntime;
  tabs: ChromeTabs;
  storage: { local: ChromeStorageArea };
};
