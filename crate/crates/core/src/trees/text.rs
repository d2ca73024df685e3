//! Text and JSON formats for trees.
//!
//! Text grammar (whitespace is ignored):
//!
//! ```text
//! item := leaf | node
//! leaf := integer | '*'
//! node := sign? '(' item (',' item)+ ')'
//! sign := '+' | '-'
//! ```
//!
//! Signed trees require a sign on every internal node; unsigned shapes
//! ([`UnorderedTree`]) require none and only `*` leaves.

use serde_json::{json, Map, Value};

use super::{Canonical, Cotree, GeneralizedCotree, Sign, SignedNode, SignedTree, UnorderedTree};
use crate::error::{Error, ParseError, Result};

/// Labels beyond this are rejected by the parsers.
const MAX_LABEL: usize = 1 << 40;

/// A parsed signed tree together with whether its signs alternate, so the
/// caller can decide between [`Cotree`] and [`GeneralizedCotree`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParsedCotree {
    pub tree: SignedTree,
    pub alternating: bool,
}

impl ParsedCotree {
    fn new(tree: SignedTree) -> Self {
        let alternating = tree.is_alternating();
        ParsedCotree { tree, alternating }
    }

    pub fn into_cotree(self) -> Result<Cotree> {
        Cotree::new(self.tree)
    }

    pub fn into_generalized(self) -> GeneralizedCotree {
        GeneralizedCotree::new(self.tree)
    }
}

struct RawNode {
    sign: Option<Sign>,
    unsigned_internal: bool,
    label: Option<usize>,
    pos: usize,
    children: Vec<usize>,
}

/// Iterative recursive-descent parser; nodes come out in preorder.
fn parse_raw(text: &str) -> Result<Vec<RawNode>, ParseError> {
    let bytes = text.as_bytes();
    let mut pos = 0usize;
    let mut nodes: Vec<RawNode> = Vec::new();
    let mut open: Vec<usize> = Vec::new();

    let skip_ws = |pos: &mut usize| {
        while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
    };
    let char_at = |pos: usize| text[pos..].chars().next().unwrap_or('\u{fffd}');

    'items: loop {
        skip_ws(&mut pos);
        let Some(&b) = bytes.get(pos) else {
            return Err(ParseError::UnexpectedEnd);
        };
        let start = pos;
        let id = nodes.len();
        match b {
            b'+' | b'-' | b'(' => {
                let sign = match b {
                    b'+' => Some(Sign::Plus),
                    b'-' => Some(Sign::Minus),
                    _ => None,
                };
                if sign.is_some() {
                    pos += 1;
                    skip_ws(&mut pos);
                    match bytes.get(pos) {
                        Some(b'(') => {}
                        Some(_) => return Err(ParseError::UnexpectedChar { pos, found: char_at(pos) }),
                        None => return Err(ParseError::UnexpectedEnd),
                    }
                }
                pos += 1;
                nodes.push(RawNode { sign, unsigned_internal: sign.is_none(), label: None, pos: start, children: Vec::new() });
                if let Some(&p) = open.last() {
                    nodes[p].children.push(id);
                }
                open.push(id);
                continue 'items;
            }
            b'*' => {
                pos += 1;
                nodes.push(RawNode { sign: None, unsigned_internal: false, label: None, pos: start, children: Vec::new() });
            }
            b'0'..=b'9' => {
                let mut value: usize = 0;
                while let Some(d @ b'0'..=b'9') = bytes.get(pos).copied() {
                    value = value
                        .checked_mul(10)
                        .and_then(|v| v.checked_add((d - b'0') as usize))
                        .filter(|&v| v <= MAX_LABEL)
                        .ok_or(ParseError::BadInteger { pos: start })?;
                    pos += 1;
                }
                if value == 0 {
                    return Err(ParseError::BadInteger { pos: start });
                }
                nodes.push(RawNode { sign: None, unsigned_internal: false, label: Some(value), pos: start, children: Vec::new() });
            }
            _ => return Err(ParseError::UnexpectedChar { pos, found: char_at(pos) }),
        }
        if let Some(&p) = open.last() {
            nodes[p].children.push(id);
        }
        // after a complete item: close parents or move to the next sibling
        loop {
            skip_ws(&mut pos);
            let Some(&p) = open.last() else {
                if pos < bytes.len() {
                    return Err(ParseError::Trailing { pos });
                }
                return Ok(nodes);
            };
            match bytes.get(pos) {
                None => return Err(ParseError::UnexpectedEnd),
                Some(b',') => {
                    pos += 1;
                    continue 'items;
                }
                Some(b')') => {
                    if nodes[p].children.len() < 2 {
                        return Err(ParseError::TooFewChildren { pos: nodes[p].pos });
                    }
                    pos += 1;
                    open.pop();
                }
                Some(_) => return Err(ParseError::UnexpectedChar { pos, found: char_at(pos) }),
            }
        }
    }
}

/// Parses a signed tree in the text grammar.
pub fn parse_cotree(text: &str) -> Result<ParsedCotree> {
    let raw = parse_raw(text)?;
    let mut nodes = Vec::with_capacity(raw.len());
    for r in raw {
        if r.unsigned_internal {
            return Err(ParseError::MissingSign { pos: r.pos }.into());
        }
        nodes.push(SignedNode { sign: r.sign, label: r.label, children: r.children });
    }
    Ok(ParsedCotree::new(SignedTree::new(0, nodes)?))
}

/// Parses an unsigned shape such as `(*,(*,*))`.
pub fn parse_unordered(text: &str) -> Result<UnorderedTree> {
    let raw = parse_raw(text)?;
    let mut children = Vec::with_capacity(raw.len());
    for r in raw {
        if r.sign.is_some() {
            return Err(ParseError::UnexpectedSign { pos: r.pos }.into());
        }
        if r.label.is_some() {
            return Err(ParseError::UnexpectedLabel { pos: r.pos }.into());
        }
        children.push(r.children);
    }
    UnorderedTree::new(0, children)
}

/// Canonical text form; `parse_cotree(serialize_cotree(t))` equals
/// `canonicalize(t)`.
pub fn serialize_cotree(t: &SignedTree) -> String {
    t.canonical_string()
}

pub fn serialize_unordered(t: &UnorderedTree) -> String {
    t.canonical_string()
}

/// JSON export `{"sign": "+"|"-"|"leaf", "label": int?, "children": [...]}`
/// with children in canonical order.
pub fn to_json(t: &SignedTree) -> Value {
    fn node(t: &SignedTree, v: usize) -> Value {
        let n = t.node(v);
        match n.sign {
            None => match n.label {
                Some(l) => json!({ "sign": "leaf", "label": l, "children": [] }),
                None => json!({ "sign": "leaf", "children": [] }),
            },
            Some(s) => {
                let children: Vec<Value> = n.children.iter().map(|&c| node(t, c)).collect();
                json!({ "sign": s.symbol().to_string(), "children": children })
            }
        }
    }
    let c = t.canonicalize();
    node(&c, 0)
}

/// Reads the JSON tree format. Nesting is bounded by the JSON reader's
/// recursion limit (128 levels); use the text grammar for deeper trees.
pub fn parse_cotree_json(text: &str) -> Result<ParsedCotree> {
    let value: Value = serde_json::from_str(text).map_err(|e| ParseError::Json(e.to_string()))?;
    let mut nodes = Vec::new();
    fn walk(v: &Value, nodes: &mut Vec<SignedNode>) -> Result<usize, ParseError> {
        let obj: &Map<String, Value> =
            v.as_object().ok_or_else(|| ParseError::Schema("node must be an object".into()))?;
        let id = nodes.len();
        let sign = match obj.get("sign").and_then(Value::as_str) {
            Some("+") => Some(Sign::Plus),
            Some("-") => Some(Sign::Minus),
            Some("leaf") => None,
            _ => return Err(ParseError::Schema("\"sign\" must be \"+\", \"-\" or \"leaf\"".into())),
        };
        let label = match obj.get("label") {
            None | Some(Value::Null) => None,
            Some(l) => Some(
                l.as_u64()
                    .filter(|&x| x >= 1 && x as usize <= MAX_LABEL)
                    .ok_or_else(|| ParseError::Schema("\"label\" must be a positive integer".into()))?
                    as usize,
            ),
        };
        let kids = match obj.get("children") {
            None => &[][..],
            Some(Value::Array(a)) => a.as_slice(),
            Some(_) => return Err(ParseError::Schema("\"children\" must be an array".into())),
        };
        nodes.push(SignedNode { sign, label, children: Vec::new() });
        let mut children = Vec::with_capacity(kids.len());
        for k in kids {
            children.push(walk(k, nodes)?);
        }
        nodes[id].children = children;
        Ok(id)
    }
    walk(&value, &mut nodes)?;
    Ok(ParsedCotree::new(SignedTree::new(0, nodes).map_err(|e| match e {
        Error::InvalidTree(m) => Error::Parse(ParseError::Schema(m)),
        other => other,
    })?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trees::RootedTree;

    #[test]
    fn smallest_internal_node() {
        let p = parse_cotree("+(1,2)").unwrap();
        assert!(p.alternating);
        let t = p.tree;
        assert_eq!(t.sign(0), Some(Sign::Plus));
        assert_eq!(t.leaf_count(), 2);
        assert_eq!(serialize_cotree(&t), "+(1,2)");
    }

    #[test]
    fn nested_grammar() {
        let t = parse_cotree("-(1,+(2,3))").unwrap().into_cotree().unwrap();
        assert_eq!(t.sign(0), Some(Sign::Minus));
        let ch = t.children(0);
        assert_eq!(t.label(ch[0]), Some(1));
        assert_eq!(t.sign(ch[1]), Some(Sign::Plus));
    }

    #[test]
    fn outdegree_one_is_an_error() {
        assert_eq!(
            parse_cotree("+(1)").unwrap_err(),
            Error::Parse(ParseError::TooFewChildren { pos: 0 })
        );
    }

    #[test]
    fn whitespace_is_insignificant() {
        let a = parse_cotree(" - ( 1 ,\n+(2, 3) ) ").unwrap();
        assert_eq!(a, parse_cotree("-(1,+(2,3))").unwrap());
    }

    #[test]
    fn syntax_errors() {
        for bad in ["", "+", "+(", "+(1,", "+(1,2", "+(1,2))", "x", "+(1;2)", "0", "+(1,2)3", "(1,2)", "+(1,*)"] {
            assert!(parse_cotree(bad).is_err(), "{bad:?} should fail");
        }
        assert!(parse_cotree("99999999999999999999999").is_err());
        assert!(parse_unordered("+(*,*)").is_err());
        assert!(parse_unordered("(1,*)").is_err());
    }

    #[test]
    fn unlabelled_leaves_serialize_as_star() {
        let t = parse_cotree("-(*,+(*,*))").unwrap().tree;
        assert_eq!(serialize_cotree(&t), "-(*,+(*,*))");
        assert!(!t.is_labelled());
    }

    #[test]
    fn non_alternating_reported() {
        let p = parse_cotree("+(1,+(2,3))").unwrap();
        assert!(!p.alternating);
        assert!(p.clone().into_cotree().is_err());
        assert_eq!(p.into_generalized().leaf_count(), 3);
    }

    #[test]
    fn json_round_trip() {
        let t = parse_cotree("+(-(3,+(1,4)),2)").unwrap().tree;
        let v = to_json(&t);
        assert_eq!(v["sign"], "+");
        let back = parse_cotree_json(&v.to_string()).unwrap().tree;
        assert_eq!(back, t.canonicalize());
    }

    #[test]
    fn json_schema_errors() {
        for bad in [
            "[]",
            r#"{"sign":"x"}"#,
            r#"{"sign":"+","children":[{"sign":"leaf","label":1}]}"#,
            r#"{"sign":"leaf","label":0}"#,
            r#"{"sign":"leaf","label":2}"#,
            r#"{"sign":"+","children":{}}"#,
        ] {
            assert!(parse_cotree_json(bad).is_err(), "{bad}");
        }
    }
}
