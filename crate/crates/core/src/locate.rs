//! Maps a JSON field path such as `cores[2].position` back to the line it
//! starts on, so validation errors found after parsing can still point into
//! the source document.

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Segment {
    Key(String),
    Index(usize),
}

/// Splits `a.b[3].c` into segments. Returns `None` for anything it cannot read.
pub(crate) fn parse_path(path: &str) -> Option<Vec<Segment>> {
    let mut out = Vec::new();
    for part in path.split('.') {
        let (key, mut rest) = match part.find('[') {
            Some(i) => (&part[..i], &part[i..]),
            None => (part, ""),
        };
        if !key.is_empty() {
            out.push(Segment::Key(key.to_string()));
        }
        while let Some(stripped) = rest.strip_prefix('[') {
            let close = stripped.find(']')?;
            out.push(Segment::Index(stripped[..close].parse().ok()?));
            rest = &stripped[close + 1..];
        }
        if !rest.is_empty() {
            return None;
        }
    }
    Some(out)
}

struct Cursor<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, b: u8) -> Option<()> {
        self.ws();
        (self.peek()? == b).then(|| self.pos += 1)
    }

    fn string(&mut self) -> Option<String> {
        self.eat(b'"')?;
        let start = self.pos;
        while self.peek()? != b'"' {
            if self.peek()? == b'\\' {
                self.pos += 1;
            }
            self.pos += 1;
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).ok()?.to_string();
        self.pos += 1;
        Some(s)
    }

    fn skip_value(&mut self) -> Option<()> {
        self.ws();
        match self.peek()? {
            b'"' => self.string().map(|_| ()),
            b'{' | b'[' => {
                let mut depth = 0usize;
                loop {
                    match self.peek()? {
                        b'"' => {
                            self.string()?;
                            continue;
                        }
                        b'{' | b'[' => depth += 1,
                        b'}' | b']' => {
                            depth -= 1;
                            if depth == 0 {
                                self.pos += 1;
                                return Some(());
                            }
                        }
                        _ => {}
                    }
                    self.pos += 1;
                }
            }
            _ => {
                while let Some(b) = self.peek() {
                    if matches!(b, b',' | b'}' | b']') || b.is_ascii_whitespace() {
                        break;
                    }
                    self.pos += 1;
                }
                Some(())
            }
        }
    }

    /// Leaves the cursor on the value addressed by `seg`.
    fn descend(&mut self, seg: &Segment) -> Option<()> {
        self.ws();
        match seg {
            Segment::Key(want) => {
                self.eat(b'{')?;
                loop {
                    let key = self.string()?;
                    self.eat(b':')?;
                    self.ws();
                    if &key == want {
                        return Some(());
                    }
                    self.skip_value()?;
                    self.eat(b',')?;
                }
            }
            Segment::Index(want) => {
                self.eat(b'[')?;
                for _ in 0..*want {
                    self.skip_value()?;
                    self.eat(b',')?;
                }
                self.ws();
                Some(())
            }
        }
    }
}

/// 1-based line where the value at `path` starts.
pub(crate) fn line_of(doc: &str, path: &str) -> Option<usize> {
    let segments = parse_path(path)?;
    let mut cur = Cursor {
        src: doc.as_bytes(),
        pos: 0,
    };
    for seg in &segments {
        cur.descend(seg)?;
    }
    Some(doc.as_bytes()[..cur.pos].iter().filter(|&&b| b == b'\n').count() + 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splits_paths() {
        assert_eq!(
            parse_path("cores[2].position").unwrap(),
            vec![
                Segment::Key("cores".into()),
                Segment::Index(2),
                Segment::Key("position".into())
            ]
        );
        assert!(parse_path("a[x]").is_none());
    }

    #[test]
    fn finds_lines() {
        let doc = "{\n  \"a\": {\"s\": \"x}]\\\"\"},\n  \"cores\": [\n    {\"position\": [0, 0]},\n    {\"id\": 1,\n     \"position\": [5, 0]}\n  ]\n}";
        assert_eq!(line_of(doc, "cores"), Some(3));
        assert_eq!(line_of(doc, "cores[0].position"), Some(4));
        assert_eq!(line_of(doc, "cores[1].position"), Some(6));
        assert_eq!(line_of(doc, "missing"), None);
    }
}
