//! Potential spec files.
//!
//! ```text
//! # a box
//! type = piecewise
//! segments = [(1, 2, 4.0), (3, 3.5, 1)]
//! ```
//!
//! Entries are `key = value`, separated by newlines or by commas outside
//! brackets. Recognised keys:
//!
//! * `type`: `piecewise`, `table` or `expression`
//! * `segments`: `[(lo, hi, value), ...]` for `piecewise`
//! * `file`: CSV with columns `r, V` for `table`, relative to the spec file
//! * `points`: `[(r, V), ...]`, an inline alternative to `file`
//! * `expr`: arithmetic in `r` for `expression`
//! * `support`: `(lo, hi)` for `expression`; detected where `|V| > 1e-12` if absent

use std::fmt;
use std::path::{Path, PathBuf};

use hardylt_core::expr::Expr;
use hardylt_core::potential::{Potential, Segment, Table};

/// Error at a 1-based line and column of the spec text; line 0 when the
/// file itself could not be read.
#[derive(Debug, Clone, PartialEq)]
pub struct SpecError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for SpecError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line == 0 {
            return write!(f, "{}", self.message);
        }
        write!(f, "line {}, column {}: {}", self.line, self.column, self.message)
    }
}

impl std::error::Error for SpecError {}

#[derive(Debug, Clone)]
struct Entry {
    key: String,
    key_at: usize,
    value: String,
    value_at: usize,
}

struct Source {
    chars: Vec<char>,
}

impl Source {
    fn locate(&self, offset: usize) -> (usize, usize) {
        let mut line = 1;
        let mut col = 1;
        for &c in self.chars.iter().take(offset) {
            if c == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
        }
        (line, col)
    }

    fn error(&self, offset: usize, message: impl Into<String>) -> SpecError {
        let (line, column) = self.locate(offset);
        SpecError { line, column, message: message.into() }
    }

    /// Splits into `key = value` entries, dropping comments.
    fn entries(&self) -> Result<Vec<Entry>, SpecError> {
        let chars = &self.chars;
        let mut out = Vec::new();
        let mut start = 0;
        let mut depth: i32 = 0;
        let mut i = 0;
        let mut cleaned: Vec<char> = chars.clone();
        // blank out comments, keeping offsets
        let mut in_comment = false;
        for c in cleaned.iter_mut() {
            if *c == '#' {
                in_comment = true;
            }
            if *c == '\n' {
                in_comment = false;
            }
            if in_comment {
                *c = ' ';
            }
        }
        while i <= cleaned.len() {
            let c = cleaned.get(i).copied();
            match c {
                Some('(') | Some('[') => depth += 1,
                Some(')') | Some(']') => {
                    depth -= 1;
                    if depth < 0 {
                        return Err(self.error(i, format!("unbalanced '{}'", c.unwrap())));
                    }
                }
                _ => {}
            }
            let boundary = match c {
                None => true,
                Some('\n') => depth == 0,
                Some(',') => depth == 0,
                _ => false,
            };
            if boundary {
                if depth > 0 {
                    return Err(self.error(i, "unclosed bracket at end of input"));
                }
                let piece: String = cleaned[start..i].iter().collect();
                if !piece.trim().is_empty() {
                    out.push(self.entry(&cleaned, start, i)?);
                }
                start = i + 1;
            }
            i += 1;
        }
        Ok(out)
    }

    fn entry(&self, chars: &[char], start: usize, end: usize) -> Result<Entry, SpecError> {
        let lead = (start..end).find(|&j| !chars[j].is_whitespace()).unwrap_or(start);
        let Some(eq) = (start..end).find(|&j| chars[j] == '=') else {
            return Err(self.error(lead, "expected 'key = value'"));
        };
        let key: String = chars[start..eq].iter().collect::<String>().trim().to_string();
        if key.is_empty() || !key.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
            return Err(self.error(lead, format!("invalid key '{key}'")));
        }
        let value_at = (eq + 1..end).find(|&j| !chars[j].is_whitespace()).unwrap_or(end);
        let value: String = chars[value_at..end].iter().collect::<String>().trim_end().to_string();
        if value.is_empty() {
            return Err(self.error(eq, format!("missing value for '{key}'")));
        }
        Ok(Entry { key, key_at: lead, value, value_at })
    }
}

/// Cursor over a value for tuple lists.
struct Cursor<'a> {
    chars: Vec<char>,
    pos: usize,
    base: usize,
    src: &'a Source,
}

impl Cursor<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn error(&self, message: impl Into<String>) -> SpecError {
        self.src.error(self.base + self.pos, message)
    }

    fn expect(&mut self, c: char) -> Result<(), SpecError> {
        self.skip_ws();
        if self.chars.get(self.pos) == Some(&c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(format!("expected '{c}'")))
        }
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.chars.get(self.pos) == Some(&c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn number(&mut self) -> Result<f64, SpecError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.chars.len() && !matches!(self.chars[self.pos], ',' | ')' | ']') && !self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
        let text: String = self.chars[start..self.pos].iter().collect();
        text.parse::<f64>().map_err(|_| self.src.error(self.base + start, format!("expected a number, found '{text}'")))
    }

    fn tuple(&mut self, arity: usize) -> Result<Vec<f64>, SpecError> {
        self.expect('(')?;
        let mut out = Vec::with_capacity(arity);
        for i in 0..arity {
            if i > 0 {
                self.expect(',')?;
            }
            out.push(self.number()?);
        }
        self.expect(')')?;
        Ok(out)
    }

    fn tuple_list(&mut self, arity: usize) -> Result<Vec<Vec<f64>>, SpecError> {
        self.expect('[')?;
        let mut out = Vec::new();
        if self.eat(']') {
            return self.finish(out);
        }
        loop {
            out.push(self.tuple(arity)?);
            if self.eat(']') {
                return self.finish(out);
            }
            self.expect(',')?;
        }
    }

    fn finish<T>(&mut self, v: T) -> Result<T, SpecError> {
        self.skip_ws();
        if self.pos < self.chars.len() {
            return Err(self.error("unexpected trailing text"));
        }
        Ok(v)
    }
}

fn cursor<'a>(src: &'a Source, e: &Entry) -> Cursor<'a> {
    Cursor { chars: e.value.chars().collect(), pos: 0, base: e.value_at, src }
}

/// Parses a spec; `file` entries resolve against `base_dir`.
pub fn parse_potential_spec_in(text: &str, base_dir: &Path) -> Result<Potential, SpecError> {
    let src = Source { chars: text.chars().collect() };
    let entries = src.entries()?;
    let find = |k: &str| entries.iter().find(|e| e.key == k);
    for (i, e) in entries.iter().enumerate() {
        if !matches!(e.key.as_str(), "type" | "segments" | "file" | "points" | "expr" | "support") {
            return Err(src.error(e.key_at, format!("unknown key '{}'", e.key)));
        }
        if entries[..i].iter().any(|o| o.key == e.key) {
            return Err(src.error(e.key_at, format!("duplicate key '{}'", e.key)));
        }
    }
    let Some(kind) = find("type") else {
        return Err(SpecError { line: 1, column: 1, message: "missing 'type'".into() });
    };
    let required = |k: &str| find(k).ok_or_else(|| src.error(kind.key_at, format!("type '{}' needs '{k}'", kind.value)));
    match kind.value.as_str() {
        "piecewise" => {
            let e = required("segments")?;
            let rows = cursor(&src, e).tuple_list(3)?;
            let segs = rows.iter().map(|t| Segment { lo: t[0], hi: t[1], value: t[2] }).collect();
            Potential::piecewise(segs).map_err(|err| src.error(e.value_at, err.to_string()))
        }
        "table" => {
            let (r, v, at) = match (find("file"), find("points")) {
                (Some(e), None) => {
                    let name = e.value.trim_matches('"');
                    let path = base_dir.join(name);
                    let (r, v) = read_table_csv(&path).map_err(|m| src.error(e.value_at, m))?;
                    (r, v, e.value_at)
                }
                (None, Some(e)) => {
                    let rows = cursor(&src, e).tuple_list(2)?;
                    (rows.iter().map(|t| t[0]).collect(), rows.iter().map(|t| t[1]).collect(), e.value_at)
                }
                (Some(_), Some(e)) => return Err(src.error(e.key_at, "give either 'file' or 'points', not both")),
                (None, None) => return Err(src.error(kind.key_at, "type 'table' needs 'file' or 'points'")),
            };
            Table::new(r, v).map(Potential::Table).map_err(|err| src.error(at, err.to_string()))
        }
        "expression" => {
            let e = required("expr")?;
            let expr = Expr::parse(&e.value).map_err(|err| src.error(e.value_at + err.offset, err.message))?;
            match find("support") {
                Some(s) => {
                    let t = cursor(&src, s).tuple(2)?;
                    Potential::expression(expr, (t[0], t[1])).map_err(|err| src.error(s.value_at, err.to_string()))
                }
                None => Potential::expression_auto(expr).map_err(|err| src.error(e.value_at, err.to_string())),
            }
        }
        other => Err(src.error(kind.value_at, format!("unknown potential type '{other}'"))),
    }
}

/// Parses a spec whose `file` entries are relative to the working directory.
pub fn parse_potential_spec(text: &str) -> Result<Potential, SpecError> {
    parse_potential_spec_in(text, Path::new("."))
}

/// Reads a spec file; errors carry the path.
pub fn load_potential(path: &Path) -> Result<Potential, SpecError> {
    let text = std::fs::read_to_string(path).map_err(|e| SpecError {
        line: 0,
        column: 0,
        message: format!("cannot read {}: {e}", path.display()),
    })?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from("."));
    parse_potential_spec_in(&text, &base).map_err(|e| SpecError { message: format!("{} ({})", e.message, path.display()), ..e })
}

/// Two numeric columns; a non-numeric first row is taken as a header.
fn read_table_csv(path: &Path) -> Result<(Vec<f64>, Vec<f64>), String> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let (mut r, mut v) = (Vec::new(), Vec::new());
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| format!("{}: {e}", path.display()))?;
        if rec.len() != 2 {
            return Err(format!("{} row {}: expected 2 columns, found {}", path.display(), i + 1, rec.len()));
        }
        match (rec[0].parse::<f64>(), rec[1].parse::<f64>()) {
            (Ok(a), Ok(b)) => {
                r.push(a);
                v.push(b);
            }
            _ if i == 0 => continue,
            _ => return Err(format!("{} row {}: non-numeric entry", path.display(), i + 1)),
        }
    }
    Ok((r, v))
}

fn fmt_num(x: f64) -> String {
    format!("{x:?}")
}

/// Spec text for `v`. Transformed tables are resampled at the images of their
/// nodes, eight points per original cell.
pub fn to_spec_text(v: &Potential) -> Result<String, String> {
    Ok(match v {
        Potential::Zero => "type = piecewise\nsegments = []\n".into(),
        Potential::Piecewise(segs) => {
            let rows: Vec<String> =
                segs.iter().map(|s| format!("({}, {}, {})", fmt_num(s.lo), fmt_num(s.hi), fmt_num(s.value))).collect();
            format!("type = piecewise\nsegments = [{}]\n", rows.join(", "))
        }
        Potential::Table(t) => points_text(t.nodes(), t.values()),
        Potential::Expression { expr, support } => {
            format!("type = expression\nexpr = {}\nsupport = ({}, {})\n", expr.0, fmt_num(support.0), fmt_num(support.1))
        }
        Potential::Transformed { inner, change } => match inner.as_ref() {
            Potential::Table(t) => {
                let mut r = Vec::new();
                for w in t.nodes().windows(2) {
                    for j in 0..8 {
                        r.push(change.invert(w[0] + (w[1] - w[0]) * j as f64 / 8.0));
                    }
                }
                r.push(change.invert(*t.nodes().last().unwrap()));
                r.sort_by(f64::total_cmp);
                r.dedup();
                let vals: Vec<f64> = r.iter().map(|&x| v.eval(x)).collect();
                points_text(&r, &vals)
            }
            _ => return Err("this potential has no spec-file form".into()),
        },
        Potential::PositivePart(_) | Potential::HardyExcess(_) => {
            return Err("this potential has no spec-file form".into())
        }
    })
}

fn points_text(r: &[f64], v: &[f64]) -> String {
    let rows: Vec<String> = r.iter().zip(v).map(|(a, b)| format!("({}, {})", fmt_num(*a), fmt_num(*b))).collect();
    format!("type = table\npoints = [{}]\n", rows.join(", "))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_line_box() {
        let v = parse_potential_spec("type=piecewise, segments=[(1,2,4.0)]").unwrap();
        assert_eq!(v.support(), Some((1.0, 2.0)));
        assert_eq!(v.eval(1.5), 4.0);
    }

    #[test]
    fn gaussian_support_detected() {
        let v = parse_potential_spec("type = expression\nexpr = exp(-(r-3)^2)").unwrap();
        let (lo, hi) = v.support().unwrap();
        let reach = (1e12f64).ln().sqrt();
        assert!(lo >= 0.0 && lo < 0.1, "{lo}");
        assert!((hi - (3.0 + reach)).abs() < 1e-2, "{hi}");
    }

    #[test]
    fn errors_point_at_the_problem() {
        let e = parse_potential_spec("type = piecewise\nsegments = [(1, 2 4)]").unwrap_err();
        assert_eq!((e.line, e.column), (2, 19), "{e}");
        let e = parse_potential_spec("type = expression\n  expr = 1 + * r").unwrap_err();
        assert_eq!((e.line, e.column), (2, 14), "{e}");
        let e = parse_potential_spec("type = table\npoints = [(1, 0), (1, 2)]").unwrap_err();
        assert_eq!(e.line, 2);
        let e = parse_potential_spec("kind = piecewise").unwrap_err();
        assert_eq!((e.line, e.column), (1, 1));
        let e = parse_potential_spec("type = piecewise\nsegments = [(1,2,3)\n").unwrap_err();
        assert!(e.message.contains("unclosed"), "{e}");
    }

    #[test]
    fn comments_and_inline_points() {
        let v = parse_potential_spec("# table\ntype = table # inline\npoints = [(1, 0), (2, 3), (3, 0)]\n").unwrap();
        assert_eq!(v.eval(2.0), 3.0);
        assert_eq!(v.eval(1.5), 1.5);
    }

    #[test]
    fn written_specs_parse_back() {
        for text in [
            "type = piecewise\nsegments = [(0.5, 1.25, 3.0), (2.0, 2.5, -1.0)]",
            "type = expression\nexpr = 2*r*exp(-r)\nsupport = (0.1, 4)",
            "type = table\npoints = [(1, 0), (2, 3.5), (3, 0)]",
        ] {
            let v = parse_potential_spec(text).unwrap();
            let again = parse_potential_spec(&to_spec_text(&v).unwrap()).unwrap();
            assert_eq!(v, again);
        }
    }
}
