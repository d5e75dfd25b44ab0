/**
 * Batched embedding of JSONL fields and catalog surface forms.
 */

import { EmbeddingRow, FormatError, surfacesFromCatalog, CatalogEntry } from "./formats.js";
import { EmbeddingProvider } from "./providers.js";

export interface EmbedOptions {
  batchSize?: number;
  onProgress?: (done: number, total: number) => void;
}

async function embedStrings(
  provider: EmbeddingProvider,
  keyed: { key: string; text: string }[],
  options: EmbedOptions,
): Promise<EmbeddingRow[]> {
  const batchSize = options.batchSize ?? 8;
  if (!Number.isInteger(batchSize) || batchSize <= 0) {
    throw new FormatError(`batch size must be a positive integer, got ${batchSize}`);
  }
  const rows: EmbeddingRow[] = [];
  let dim: number | null = provider.dim;
  for (let start = 0; start < keyed.length; start += batchSize) {
    const batch = keyed.slice(start, start + batchSize);
    const vectors = await provider.embedBatch(batch.map((b) => b.text));
    if (vectors.length !== batch.length) {
      throw new FormatError(
        `provider returned ${vectors.length} vectors for a batch of ${batch.length}`,
      );
    }
    for (let i = 0; i < batch.length; i++) {
      const v = vectors[i];
      if (dim === null) dim = v.length;
      if (v.length !== dim) {
        throw new FormatError(
          `provider returned a ${v.length}-dim vector, expected ${dim} ` +
            `(model ${provider.model})`,
        );
      }
      for (const x of v) {
        if (!Number.isFinite(x)) {
          throw new FormatError(`non-finite component in vector for ${batch[i].key}`);
        }
      }
      rows.push({ id: batch[i].key, vector: v });
    }
    options.onProgress?.(Math.min(start + batchSize, keyed.length), keyed.length);
  }
  return rows;
}

/**
 * Embed one string field from parsed JSONL rows.
 *
 * With field "surface" the output is keyed by the surface string itself and
 * duplicate strings collapse to a single row (first occurrence wins the
 * position). Any other field requires an "id" per row and keeps one row per
 * input row, rejecting duplicate ids.
 */
export async function embedField(
  provider: EmbeddingProvider,
  rows: unknown[],
  field: string,
  options: EmbedOptions = {},
): Promise<EmbeddingRow[]> {
  const keyed: { key: string; text: string }[] = [];
  const seen = new Set<string>();
  for (let i = 0; i < rows.length; i++) {
    const row = rows[i] as Record<string, unknown>;
    if (typeof row !== "object" || row === null) {
      throw new FormatError(`row ${i + 1} is not an object`);
    }
    const text = row[field];
    if (typeof text !== "string") {
      throw new FormatError(`row ${i + 1} has no string field '${field}'`);
    }
    if (field === "surface") {
      if (seen.has(text)) continue; // same string, same vector; embed once
      seen.add(text);
      keyed.push({ key: text, text });
    } else {
      const id = row.id;
      if (typeof id !== "string") {
        throw new FormatError(`row ${i + 1} has no string 'id'`);
      }
      if (seen.has(id)) {
        throw new FormatError(`duplicate id: ${id}`);
      }
      seen.add(id);
      keyed.push({ key: id, text });
    }
  }
  return embedStrings(provider, keyed, options);
}

/** Embed every distinct surface form a catalog can resolve to, exactly once
 * each, keyed by the surface string. */
export async function embedSurfaces(
  provider: EmbeddingProvider,
  catalog: CatalogEntry[],
  options: EmbedOptions = {},
): Promise<EmbeddingRow[]> {
  const keyed = surfacesFromCatalog(catalog).map((s) => ({ key: s, text: s }));
  return embedStrings(provider, keyed, options);
}
