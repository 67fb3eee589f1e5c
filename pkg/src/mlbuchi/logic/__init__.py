"""MSO over ω-words and chain logic over tree iterations."""
from .chain import (
    ChainEncoding, Sibling, chain_to_mso, chain_tracks, decide_chain_sentence, encode_chain,
    format_chain, parse_chain,
)
from .mso import (
    LetterPred, MsoCompiler, compile_mso, decide_mso, format_mso, formula_of, mso_tracks,
    parse_mso,
)

__all__ = [
    "LetterPred", "MsoCompiler", "parse_mso", "format_mso", "compile_mso", "decide_mso",
    "formula_of", "mso_tracks", "Sibling", "ChainEncoding", "parse_chain", "format_chain",
    "chain_to_mso", "chain_tracks", "decide_chain_sentence", "encode_chain",
]
