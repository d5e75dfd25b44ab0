export {
  EmbeddingRow,
  CatalogEntry,
  FormatError,
  readJsonl,
  writeJsonl,
  validateEmbeddings,
  writeEmbeddings,
  readCatalog,
  writeCatalog,
  surfacesFromCatalog,
} from "./formats.js";
export {
  EmbeddingProvider,
  MODEL_DIMS,
  FakeProvider,
  HttpProvider,
  providerFor,
} from "./providers.js";
export { embedField, embedSurfaces, EmbedOptions } from "./embed.js";
export {
  KEYWORD_COUNT,
  ChatProvider,
  buildPrompt,
  parseKeywords,
  generateKeywords,
  HttpChatProvider,
  LocalChatProvider,
  LabelStatus,
  KeywordRunResult,
} from "./keywords.js";
