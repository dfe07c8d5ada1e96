"""Frame-based word sense disambiguation and terminology injection for MT."""

from ._core import (
    DictionaryProvider,
    Error,
    EvalError,
    FileDictionary,
    Lexicon,
    LexiconError,
    MalformedResponseError,
    MockTranslationProvider,
    ParseError,
    ProviderError,
    Sentence,
    TranslationProvider,
    TransportError,
    UnknownLuError,
    UnsupportedLanguageError,
    bleu,
    disambiguate,
    frame_overlap,
    frames_of_sentence,
    hter,
    hybrid,
    jaro_winkler,
    load_conllu,
    load_dictionary_provider,
    load_translation_provider,
    output_fn,
    parse_conllu,
    run_cli,
    sentence_bleu,
    ter,
    translate_s,
    translate_t,
)

__all__ = [name for name in dir() if not name.startswith("_")]
