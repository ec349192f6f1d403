//! Multilingual markdown: a lightweight markup language for parallel
//! multilingual text with coreference annotations. Documents parse to an
//! immutable model, serialize back canonically, and render to HTML in four
//! bilingual display modes.

mod ast;
mod parser;
mod render;

pub use ast::{
    inline_seq_plain_text, inline_seq_to_string, serialize, Block, DisplayMode, Inline, InlineSeq,
    MlmdDocument,
};
pub use parser::{parse, MlmdError};
pub use render::{extract_annotations, render_html, Annotation};
