// Local favorites list persisted in browser storage, newest first. Toggling
// also emits a favorite event through the injected emitter, fire-and-forget:
// the local list updates even when the event POST fails.

export interface FavoriteEntry {
  doi: string;
  title: string;
  saved_at: string;
}

export type FavoriteEmitter = (doi: string, title: string) => void;

const STORAGE_KEY = "litpool:favorites";

type StorageLike = Pick<Storage, "getItem" | "setItem">;

export class FavoritesStore {
  constructor(
    private readonly storage: StorageLike,
    private readonly emit: FavoriteEmitter = () => undefined,
    private readonly now: () => string = () => new Date().toISOString(),
  ) {}

  list(): FavoriteEntry[] {
    try {
      const raw = this.storage.getItem(STORAGE_KEY);
      const parsed: unknown = raw ? JSON.parse(raw) : [];
      if (!Array.isArray(parsed)) return [];
      return parsed.filter(
        (e): e is FavoriteEntry =>
          typeof e === "object" && e !== null && "doi" in e && "title" in e,
      );
    } catch {
      return [];
    }
  }

  has(doi: string): boolean {
    return this.list().some((entry) => entry.doi === doi);
  }

  /** Add or remove; returns the new membership state. */
  toggle(doi: string, title: string): boolean {
    const entries = this.list();
    const without = entries.filter((entry) => entry.doi !== doi);
    const added = without.length === entries.length;
    if (added) {
      without.unshift({ doi, title, saved_at: this.now() });
    }
    this.storage.setItem(STORAGE_KEY, JSON.stringify(without));
    this.emit(doi, title);
    return added;
  }
}
