/**
 * Embedding providers.
 *
 * A provider turns a batch of strings into one vector per string. Two are
 * shipped: an HTTP client for OpenAI-compatible /embeddings endpoints, and
 * a deterministic offline fake for tests and dry runs.
 */

export interface EmbeddingProvider {
  readonly model: string;
  readonly dim: number | null; // null when the registry doesn't know it
  embedBatch(texts: string[]): Promise<number[][]>;
}

/** Published output widths for the encoders we have exported before.
 * Models absent from this table still work; their width just isn't checked. */
export const MODEL_DIMS: Record<string, number> = {
  "avsolatorio/GIST-large-Embedding-v0": 1024,
  "Alibaba-NLP/gte-large-en-v1.5": 1024,
  "dunzhang/stella_en_400M_v5": 8192,
  "WhereIsAI/UAE-Large-V1": 1024,
  "mixedbread-ai/mxbai-embed-large-v1": 1024,
  "BAAI/bge-base-en-v1.5": 768,
  "jamesgpt1/sf_model_e5": 1024,
  "sentence-transformers/all-mpnet-base-v2": 768,
  "textgain/TopicAwareSTallmpnetbasev2Wiki": 768,
  "glove.6B.300d": 300,
};

// 32-bit FNV-1a; cheap and stable across platforms.
function fnv1a(s: string): number {
  let h = 0x811c9dc5;
  for (let i = 0; i < s.length; i++) {
    h ^= s.charCodeAt(i);
    h = Math.imul(h, 0x01000193);
  }
  return h >>> 0;
}

function xorshift32(state: number): () => number {
  let x = state || 1;
  return () => {
    x ^= x << 13;
    x ^= x >>> 17;
    x ^= x << 5;
    x >>>= 0;
    return x / 0x100000000;
  };
}

/**
 * Offline provider: the vector for a string is a pure function of the
 * string and the dimension, so repeated runs agree to the last bit.
 * Select with a model id of the form "fake:<dim>".
 */
export class FakeProvider implements EmbeddingProvider {
  readonly model: string;
  readonly dim: number;

  constructor(dim: number) {
    if (!Number.isInteger(dim) || dim <= 0) {
      throw new Error(`fake provider dimension must be a positive integer, got ${dim}`);
    }
    this.model = `fake:${dim}`;
    this.dim = dim;
  }

  async embedBatch(texts: string[]): Promise<number[][]> {
    return texts.map((t) => {
      const next = xorshift32(fnv1a(t));
      const v = new Array<number>(this.dim);
      for (let i = 0; i < this.dim; i++) v[i] = next() * 2 - 1;
      return v;
    });
  }
}

export interface HttpProviderOptions {
  baseUrl: string;
  apiKey?: string;
  model: string;
}

/**
 * Client for POST {baseUrl}/embeddings with body {"model", "input"},
 * expecting {"data": [{"embedding": [...]} ...]} in input order. The key
 * comes from options or the EMBEDDINGS_API_KEY environment variable.
 */
export class HttpProvider implements EmbeddingProvider {
  readonly model: string;
  readonly dim: number | null;
  private baseUrl: string;
  private apiKey: string | undefined;

  constructor(options: HttpProviderOptions) {
    this.model = options.model;
    this.dim = MODEL_DIMS[options.model] ?? null;
    this.baseUrl = options.baseUrl.replace(/\/$/, "");
    this.apiKey = options.apiKey ?? process.env.EMBEDDINGS_API_KEY;
  }

  async embedBatch(texts: string[]): Promise<number[][]> {
    const headers: Record<string, string> = { "Content-Type": "application/json" };
    if (this.apiKey) headers["Authorization"] = `Bearer ${this.apiKey}`;
    let res: Response;
    try {
      res = await fetch(`${this.baseUrl}/embeddings`, {
        method: "POST",
        headers,
        body: JSON.stringify({ model: this.model, input: texts }),
      });
    } catch (err) {
      throw new Error(`embedding request failed: ${(err as Error).message}`);
    }
    if (!res.ok) {
      const detail = await res.text().catch(() => "");
      throw new Error(
        `embedding endpoint returned ${res.status} for a batch of ${texts.length}; ` +
          `if this is a capacity error, retry with a smaller --batch-size. ${detail}`.trim(),
      );
    }
    const payload = (await res.json()) as { data?: { embedding?: number[] }[] };
    if (!payload.data || payload.data.length !== texts.length) {
      throw new Error(
        `embedding endpoint returned ${payload.data?.length ?? 0} vectors for ${texts.length} inputs`,
      );
    }
    return payload.data.map((d, i) => {
      if (!Array.isArray(d.embedding)) {
        throw new Error(`missing embedding for input ${i}`);
      }
      return d.embedding;
    });
  }
}

/** Build a provider from a model id. "fake:<dim>" selects the offline
 * provider; anything else goes over HTTP and needs a base URL. */
export function providerFor(model: string, baseUrl?: string, apiKey?: string): EmbeddingProvider {
  const fake = /^fake:(\d+)$/.exec(model);
  if (fake) return new FakeProvider(parseInt(fake[1], 10));
  if (!baseUrl) {
    throw new Error(`model ${model} needs --base-url (or use fake:<dim> for offline runs)`);
  }
  return new HttpProvider({ baseUrl, apiKey, model });
}
