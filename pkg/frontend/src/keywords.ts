/**
 * Keyword generation for catalog labels via a chat-completion provider.
 *
 * Each label gets exactly ten keywords written back into the catalog. The
 * prompt below is our house wording; swap it out if your provider needs a
 * different shape, the parser only cares about the JSON array in the reply.
 */

import { CatalogEntry, FormatError } from "./formats.js";

export const KEYWORD_COUNT = 10;

export interface ChatProvider {
  readonly model: string;
  complete(prompt: string): Promise<string>;
}

export function buildPrompt(entry: CatalogEntry): string {
  const name = entry.adjusted_name ?? entry.label;
  return (
    `Generate exactly ${KEYWORD_COUNT} distinct keywords or short keyphrases that ` +
    `characterize the topic "${name}". Favor terms a domain expert would use in ` +
    `titles or abstracts. Respond with a JSON array of ${KEYWORD_COUNT} strings ` +
    `and nothing else.`
  );
}

/** Pull the first JSON array of strings out of a model reply. */
export function parseKeywords(reply: string): string[] {
  const start = reply.indexOf("[");
  const end = reply.lastIndexOf("]");
  if (start === -1 || end === -1 || end < start) {
    throw new FormatError("reply contains no JSON array");
  }
  let parsed: unknown;
  try {
    parsed = JSON.parse(reply.slice(start, end + 1));
  } catch {
    throw new FormatError("reply contains a malformed JSON array");
  }
  if (!Array.isArray(parsed) || parsed.some((k) => typeof k !== "string")) {
    throw new FormatError("reply array must contain only strings");
  }
  return parsed as string[];
}

export interface LabelStatus {
  label: string;
  status: "ok" | "truncated" | "failed";
  detail?: string;
}

export interface KeywordRunResult {
  catalog: CatalogEntry[];
  statuses: LabelStatus[];
}

/**
 * Fill in keywords for every catalog entry. A reply with more than ten
 * keywords is truncated (status "truncated"); a short reply or a provider
 * error leaves that entry's existing keywords alone (status "failed") and
 * the run continues, so one flaky label doesn't cost the whole catalog.
 */
export async function generateKeywords(
  provider: ChatProvider,
  catalog: CatalogEntry[],
  warn: (msg: string) => void = console.warn,
): Promise<KeywordRunResult> {
  const out: CatalogEntry[] = [];
  const statuses: LabelStatus[] = [];
  for (const entry of catalog) {
    try {
      const reply = await provider.complete(buildPrompt(entry));
      let keywords = parseKeywords(reply);
      if (keywords.length > KEYWORD_COUNT) {
        warn(
          `${entry.label}: provider returned ${keywords.length} keywords, keeping the first ${KEYWORD_COUNT}`,
        );
        keywords = keywords.slice(0, KEYWORD_COUNT);
        out.push({ ...entry, keywords });
        statuses.push({ label: entry.label, status: "truncated" });
      } else if (keywords.length < KEYWORD_COUNT) {
        warn(
          `${entry.label}: provider returned ${keywords.length} keywords, expected ${KEYWORD_COUNT}; keeping previous keywords`,
        );
        out.push({ ...entry });
        statuses.push({
          label: entry.label,
          status: "failed",
          detail: `expected ${KEYWORD_COUNT} keywords, got ${keywords.length}`,
        });
      } else {
        out.push({ ...entry, keywords });
        statuses.push({ label: entry.label, status: "ok" });
      }
    } catch (err) {
      const detail = (err as Error).message;
      warn(`${entry.label}: ${detail}; keeping previous keywords`);
      out.push({ ...entry });
      statuses.push({ label: entry.label, status: "failed", detail });
    }
  }
  return { catalog: out, statuses };
}

export interface HttpChatOptions {
  baseUrl: string;
  apiKey?: string;
  model: string;
}

/** Client for POST {baseUrl}/chat/completions, OpenAI shape. */
export class HttpChatProvider implements ChatProvider {
  readonly model: string;
  private baseUrl: string;
  private apiKey: string | undefined;

  constructor(options: HttpChatOptions) {
    this.model = options.model;
    this.baseUrl = options.baseUrl.replace(/\/$/, "");
    this.apiKey = options.apiKey ?? process.env.EMBEDDINGS_API_KEY;
  }

  async complete(prompt: string): Promise<string> {
    const headers: Record<string, string> = { "Content-Type": "application/json" };
    if (this.apiKey) headers["Authorization"] = `Bearer ${this.apiKey}`;
    const res = await fetch(`${this.baseUrl}/chat/completions`, {
      method: "POST",
      headers,
      body: JSON.stringify({
        model: this.model,
        messages: [{ role: "user", content: prompt }],
      }),
    });
    if (!res.ok) {
      throw new Error(`chat endpoint returned ${res.status}`);
    }
    const payload = (await res.json()) as {
      choices?: { message?: { content?: string } }[];
    };
    const content = payload.choices?.[0]?.message?.content;
    if (typeof content !== "string") {
      throw new Error("chat reply has no message content");
    }
    return content;
  }
}

/** Offline stand-in: keywords are derived from the label text itself.
 * Useful for smoke tests and plumbing checks, not for real catalogs. */
export class LocalChatProvider implements ChatProvider {
  readonly model = "local:echo";

  async complete(prompt: string): Promise<string> {
    const quoted = /topic "([^"]+)"/.exec(prompt);
    const name = quoted ? quoted[1] : "topic";
    const words = Array.from({ length: KEYWORD_COUNT }, (_, i) => `${name} aspect ${i + 1}`);
    return JSON.stringify(words);
  }
}
