//! Symbol normalization, tokenization and pointer-target encoding.

pub mod encode;
pub mod normalize;
pub mod tokenize;

pub use encode::{
    decode_pointers, encode_corpus_pair, encode_pair, input_text, parse_statements,
    statements_text, EncodeError, EncodedPair,
};
pub use normalize::{normalize, NormalizeError, NormalizeMode, Renaming};
pub use tokenize::{bpe_train, whitespace_tokenize, BpeError, BpeModel, Tokenizer};
