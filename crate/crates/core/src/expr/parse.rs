use quick_xml::events::{BytesStart, Event};
use quick_xml::Reader;

use super::{vocab, ExprNode, ExprTree, NodeKind};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseWarning {
    pub offset: u64,
    pub message: String,
}

/// Parses a MathML fragment whose outermost element is `math` or a bare
/// expression element.
pub fn parse_mathml(xml: &str) -> Result<ExprTree> {
    parse_mathml_verbose(xml).map(|(tree, _)| tree)
}

/// Like [`parse_mathml`], also returning warnings for unknown elements.
pub fn parse_mathml_verbose(xml: &str) -> Result<(ExprTree, Vec<ParseWarning>)> {
    let mut warnings = Vec::new();
    let raw = read_raw(xml, &mut warnings)?;
    let tree = split_wrappers(raw)?;
    Ok((tree, warnings))
}

struct Open {
    label: String,
    offset: u64,
    children: Vec<Raw>,
    text: String,
}

struct Raw {
    label: String,
    offset: u64,
    text: Option<String>,
    children: Vec<Raw>,
}

fn xml_err(reader: &Reader<&[u8]>, e: impl ToString) -> Error {
    Error::Xml {
        offset: reader.error_position(),
        message: e.to_string(),
    }
}

fn label_of(e: &BytesStart<'_>) -> String {
    let local = e.local_name();
    let name: &str = local.as_ref();
    name.to_string()
}

fn read_raw(xml: &str, warnings: &mut Vec<ParseWarning>) -> Result<Raw> {
    let mut reader = Reader::from_reader(xml.as_bytes());
    reader.config_mut().check_end_names = true;
    let mut stack: Vec<Open> = Vec::new();
    let mut root: Option<Raw> = None;

    let mut note_unknown = |label: &str, offset: u64| {
        if !vocab::is_wrapper(label) && !vocab::is_presentation(label) && !vocab::is_content(label)
        {
            warnings.push(ParseWarning {
                offset,
                message: format!("unknown element <{label}>"),
            });
        }
    };

    loop {
        let offset = reader.buffer_position();
        let event = reader.read_event().map_err(|e| xml_err(&reader, e))?;
        match event {
            Event::Start(e) => {
                if root.is_some() {
                    return Err(Error::Structure {
                        offset,
                        message: "content after the root element".into(),
                    });
                }
                let label = label_of(&e);
                note_unknown(&label, offset);
                stack.push(Open {
                    label,
                    offset,
                    children: Vec::new(),
                    text: String::new(),
                });
            }
            Event::Empty(e) => {
                let label = label_of(&e);
                note_unknown(&label, offset);
                let node = Raw {
                    label,
                    offset,
                    text: None,
                    children: Vec::new(),
                };
                attach(&mut stack, &mut root, node, offset)?;
            }
            Event::End(_) => {
                let open = stack.pop().ok_or_else(|| Error::Xml {
                    offset,
                    message: "unexpected closing tag".into(),
                })?;
                let text = normalize_text(&open.text);
                if !open.children.is_empty() && !text.is_empty() {
                    return Err(Error::Structure {
                        offset: open.offset,
                        message: format!("mixed content in <{}>", open.label),
                    });
                }
                let node = Raw {
                    label: open.label,
                    offset: open.offset,
                    text: if text.is_empty() { None } else { Some(text) },
                    children: open.children,
                };
                attach(&mut stack, &mut root, node, offset)?;
            }
            Event::Text(t) => push_text(&mut stack, &t.xml10_content(), offset)?,
            Event::CData(t) => {
                push_text(&mut stack, &t.into_inner(), offset)?;
            }
            Event::GeneralRef(r) => {
                let resolved = if let Some(c) = r.resolve_char_ref().map_err(|e| Error::Xml {
                    offset,
                    message: e.to_string(),
                })? {
                    c.to_string()
                } else {
                    let name: &str = &r.xml10_content();
                    match name {
                        "lt" => "<".to_string(),
                        "gt" => ">".to_string(),
                        "amp" => "&".to_string(),
                        "quot" => "\"".to_string(),
                        "apos" => "'".to_string(),
                        other => vocab::mathml_entity(other)
                            .ok_or_else(|| Error::Xml {
                                offset,
                                message: format!("unknown entity &{other};"),
                            })?
                            .to_string(),
                    }
                };
                push_text(&mut stack, &resolved, offset)?;
            }
            Event::Comment(_) | Event::Decl(_) | Event::PI(_) | Event::DocType(_) => {}
            Event::Eof => break,
        }
    }
    if let Some(open) = stack.last() {
        return Err(Error::Xml {
            offset: xml.len() as u64,
            message: format!("unclosed element <{}>", open.label),
        });
    }
    root.ok_or_else(|| Error::Xml {
        offset: 0,
        message: "no root element".into(),
    })
}

fn attach(stack: &mut [Open], root: &mut Option<Raw>, node: Raw, offset: u64) -> Result<()> {
    match stack.last_mut() {
        Some(parent) => parent.children.push(node),
        None => {
            if root.is_some() {
                return Err(Error::Structure {
                    offset,
                    message: "more than one root element".into(),
                });
            }
            *root = Some(node);
        }
    }
    Ok(())
}

fn push_text(stack: &mut [Open], text: &str, offset: u64) -> Result<()> {
    match stack.last_mut() {
        Some(open) => {
            open.text.push_str(text);
            Ok(())
        }
        None if text.trim().is_empty() => Ok(()),
        None => Err(Error::Structure {
            offset,
            message: "text outside the root element".into(),
        }),
    }
}

fn normalize_text(text: &str) -> String {
    text.trim().replace('\u{2212}', "-")
}

fn is_annotation(label: &str) -> bool {
    label == "annotation" || label == "annotation-xml"
}

/// Peels the `math`/`semantics` chain off the raw tree. Several expression
/// children under a wrapper are gathered into an inferred `mrow`.
fn split_wrappers(mut raw: Raw) -> Result<ExprTree> {
    let mut wrappers = Vec::new();
    while raw.label == "math" || raw.label == "semantics" {
        let offset = raw.offset;
        wrappers.push(std::mem::take(&mut raw.label));
        let mut body: Vec<Raw> = raw
            .children
            .into_iter()
            .filter(|c| !is_annotation(&c.label))
            .collect();
        raw = match body.len() {
            0 => {
                return Err(Error::Structure {
                    offset,
                    message: format!("empty <{}>", wrappers.last().unwrap()),
                })
            }
            1 => body.pop().unwrap(),
            _ => Raw {
                label: "mrow".into(),
                offset,
                text: None,
                children: body,
            },
        };
    }
    if is_annotation(&raw.label) {
        return Err(Error::Structure {
            offset: raw.offset,
            message: "expression root is an annotation".into(),
        });
    }
    let root = convert(raw)?;
    Ok(ExprTree::new(wrappers, root))
}

fn convert(raw: Raw) -> Result<ExprNode> {
    let mut children = Vec::with_capacity(raw.children.len());
    for child in raw.children {
        if is_annotation(&child.label) {
            continue;
        }
        if child.label == "semantics" || child.label == "math" {
            // nested wrappers collapse to their expression
            let inner = split_wrappers(child)?;
            children.push(inner.root);
            continue;
        }
        children.push(convert(child)?);
    }
    let kind = NodeKind::of(&raw.label);
    Ok(ExprNode {
        label: raw.label,
        text: if children.is_empty() { raw.text } else { None },
        children,
        kind,
    })
}
