//! The `MAPv1` / `HMAPv1` text format.
//!
//! `MAPv1 | pi: (1 2 3)(4 5 6) | alpha: (1 4)(2 5)(3 6) | colors: s s`
//!
//! Integers are 1-based. Boundaries appear in `alpha` as fixed points.

use super::{ColoredMap, CombMap, MapKind};
use crate::error::{Error, Result};

const MAP_HEADER: &str = "MAPv1";
const HYPERMAP_HEADER: &str = "HMAPv1";

pub fn serialize_map(cm: &ColoredMap) -> String {
    let m = cm.map();
    let header = match m.kind() {
        MapKind::Map => MAP_HEADER,
        MapKind::Hypermap => HYPERMAP_HEADER,
    };
    format!(
        "{header} | pi: {} | alpha: {} | colors: {}",
        m.pi().to_cycle_string(),
        m.alpha().to_cycle_string(),
        cm.colors().join(" ")
    )
}

/// Parse a single map line.
pub fn parse_map(text: &str) -> Result<ColoredMap> {
    parse_line(text.trim_end_matches(['\n', '\r']), 1)
}

/// Parse a file holding one map per line; blank lines and `#` comments are skipped.
pub fn parse_maps(text: &str) -> Result<Vec<ColoredMap>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
        .map(|(i, l)| parse_line(l, i + 1))
        .collect()
}

fn err(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

/// A field of the line with its 1-based starting column.
struct Field<'a> {
    text: &'a str,
    column: usize,
}

fn fields(line: &str) -> Vec<Field<'_>> {
    let mut out = Vec::new();
    let mut start = 0;
    for (i, c) in line.char_indices().chain(std::iter::once((line.len(), '|'))) {
        if c == '|' {
            let raw = &line[start..i];
            let lead = raw.len() - raw.trim_start().len();
            out.push(Field {
                text: raw.trim(),
                column: start + lead + 1,
            });
            start = i + 1;
        }
    }
    out
}

fn labeled<'a>(f: &Field<'a>, name: &str, line: usize) -> Result<Field<'a>> {
    let rest = f
        .text
        .strip_prefix(name)
        .and_then(|r| r.strip_prefix(':'))
        .ok_or_else(|| err(line, f.column, format!("expected field `{name}:`")))?;
    let lead = f.text.len() - rest.len();
    let trimmed = rest.trim_start();
    Ok(Field {
        text: trimmed.trim_end(),
        column: f.column + lead + (rest.len() - trimmed.len()),
    })
}

fn parse_cycles(f: &Field<'_>, line: usize) -> Result<Vec<Vec<usize>>> {
    let mut cycles = Vec::new();
    let mut current: Option<Vec<usize>> = None;
    let bytes = f.text.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let col = f.column + i;
        match bytes[i] {
            b'(' => {
                if current.is_some() {
                    return Err(err(line, col, "nested `(`"));
                }
                current = Some(Vec::new());
                i += 1;
            }
            b')' => {
                let c = current.take().ok_or_else(|| err(line, col, "unmatched `)`"))?;
                if c.is_empty() {
                    return Err(err(line, col, "empty cycle"));
                }
                cycles.push(c);
                i += 1;
            }
            b if b.is_ascii_whitespace() || b == b',' => i += 1,
            b if b.is_ascii_digit() => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let n: usize = f.text[start..i]
                    .parse()
                    .map_err(|_| err(line, col, "integer out of range"))?;
                if n == 0 {
                    return Err(err(line, col, "labels are 1-based"));
                }
                current
                    .as_mut()
                    .ok_or_else(|| err(line, col, "integer outside a cycle"))?
                    .push(n);
            }
            _ => return Err(err(line, col, format!("unexpected character `{}`", bytes[i] as char))),
        }
    }
    if current.is_some() {
        return Err(err(line, f.column + bytes.len(), "unterminated cycle"));
    }
    Ok(cycles)
}

fn parse_line(text: &str, line: usize) -> Result<ColoredMap> {
    let fs = fields(text);
    if fs.len() != 4 {
        return Err(err(line, 1, format!("expected 4 `|`-separated fields, found {}", fs.len())));
    }
    let kind = match fs[0].text {
        MAP_HEADER => MapKind::Map,
        HYPERMAP_HEADER => MapKind::Hypermap,
        other => return Err(err(line, fs[0].column, format!("unknown header `{other}`"))),
    };
    let pi_field = labeled(&fs[1], "pi", line)?;
    let alpha_field = labeled(&fs[2], "alpha", line)?;
    let color_field = labeled(&fs[3], "colors", line)?;
    let pi = parse_cycles(&pi_field, line)?;
    let alpha = parse_cycles(&alpha_field, line)?;
    let m: usize = pi.iter().map(Vec::len).sum();
    let alpha_len: usize = alpha.iter().map(Vec::len).sum();
    if alpha_len != m {
        return Err(err(
            line,
            alpha_field.column,
            format!("alpha covers {alpha_len} edges, pi covers {m}"),
        ));
    }
    let map = CombMap::from_cycles(&pi, &alpha, kind).map_err(|e| {
        let column = match &e {
            Error::InvalidMap { reason, .. } if reason.starts_with("pi") => pi_field.column,
            _ => alpha_field.column,
        };
        err(line, column, e.to_string())
    })?;
    let colors: Vec<String> = color_field.text.split_whitespace().map(str::to_string).collect();
    ColoredMap::new(map, colors).map_err(|e| err(line, color_field.column, e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn melon_serializes_as_documented() {
        let cm = ColoredMap::uniform(CombMap::melon(3, None).unwrap(), "s").unwrap();
        let s = serialize_map(&cm);
        assert_eq!(s, "MAPv1 | pi: (1 2 3)(4 5 6) | alpha: (1 4)(2 5)(3 6) | colors: s s");
        assert_eq!(parse_map(&s).unwrap(), cm);
    }

    #[test]
    fn boundaries_round_trip() {
        let cm = ColoredMap::uniform(CombMap::star(3).unwrap(), "t").unwrap();
        let s = serialize_map(&cm);
        assert_eq!(s, "MAPv1 | pi: (1 2 3) | alpha: (1)(2)(3) | colors: t");
        assert_eq!(parse_map(&s).unwrap(), cm);
    }

    #[test]
    fn empty_map_round_trips() {
        let cm = ColoredMap::new(CombMap::empty(), vec![]).unwrap();
        assert_eq!(parse_map(&serialize_map(&cm)).unwrap(), cm);
    }

    #[test]
    fn hypermap_header() {
        let m = CombMap::from_cycles(&[vec![1], vec![2], vec![3]], &[vec![1, 2, 3]], MapKind::Hypermap).unwrap();
        let cm = ColoredMap::uniform(m, "v").unwrap();
        let s = serialize_map(&cm);
        assert!(s.starts_with("HMAPv1 |"));
        assert_eq!(parse_map(&s).unwrap(), cm);
    }

    #[test]
    fn three_cycle_alpha_is_a_parse_error() {
        let e = parse_map("MAPv1 | pi: (1)(2)(3) | alpha: (1 2 3) | colors: a a a").unwrap_err();
        match e {
            Error::Parse { line, column, .. } => {
                assert_eq!(line, 1);
                assert_eq!(column, 32);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse_maps("MAPv1 | pi: (1 2) | alpha: (1 2) | colors: a\n\nMAPv1 | pi: (1 x) | alpha: (1 2) | colors: a")
            .unwrap_err();
        assert_eq!(
            e,
            Error::Parse {
                line: 3,
                column: 16,
                message: "unexpected character `x`".into()
            }
        );
        assert!(matches!(parse_map("MAPv2 | pi: | alpha: | colors:"), Err(Error::Parse { column: 1, .. })));
        assert!(parse_map("MAPv1 | pi: (1 2 | alpha: (1 2) | colors: a").is_err());
        assert!(parse_map("MAPv1 | pi: (1 2) | alpha: (1 2) | colors: a b").is_err());
    }
}
