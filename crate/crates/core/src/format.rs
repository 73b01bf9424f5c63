//! Line-oriented text format for automata, timed-word syntax, and DOT export.
//!
//! ```text
//! automaton A
//! alphabet b c e
//! clock x
//! locations S
//! init S
//! accepting S
//! edge S -> S : b [x == 1] reset x
//! edge S -> S : b [x >= 1]
//! ```

use std::fmt::Write;

use crate::error::{Error, ParseError, SourceSpan};
use crate::guard::{normalize_guard, CmpOp, Guard};
use crate::model::{Automaton, Edge, Monotonicity, TimedWord};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Arrow,
    Colon,
    LBracket,
    RBracket,
    Amp,
    Op(CmpOp),
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Arrow => "`->`".into(),
            Tok::Colon => "`:`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::Amp => "`&`".into(),
            Tok::Op(op) => format!("`{}`", op.symbol()),
        }
    }
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\'' || c == '.'
}

fn err(line: usize, column: usize, message: impl Into<String>) -> ParseError {
    ParseError {
        span: SourceSpan { line, column },
        message: message.into(),
    }
}

fn lex_line(text: &str, line: usize) -> Result<Vec<(Tok, usize)>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c == '#' {
            break;
        }
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let next = chars.get(i + 1).copied();
        let (tok, len) = match (c, next) {
            ('-', Some('>')) => (Tok::Arrow, 2),
            ('=', Some('=')) => (Tok::Op(CmpOp::Eq), 2),
            ('<', Some('=')) => (Tok::Op(CmpOp::Le), 2),
            ('>', Some('=')) => (Tok::Op(CmpOp::Ge), 2),
            ('<', _) => (Tok::Op(CmpOp::Lt), 1),
            ('>', _) => (Tok::Op(CmpOp::Gt), 1),
            (':', _) => (Tok::Colon, 1),
            ('[', _) => (Tok::LBracket, 1),
            (']', _) => (Tok::RBracket, 1),
            ('&', _) => (Tok::Amp, 1),
            _ if is_ident_char(c) => {
                let start = i;
                while i < chars.len() && is_ident_char(chars[i]) {
                    i += 1;
                }
                out.push((Tok::Ident(chars[start..i].iter().collect()), col));
                continue;
            }
            _ => return Err(err(line, col, format!("unexpected character `{c}`"))),
        };
        out.push((tok, col));
        i += len;
    }
    Ok(out)
}

struct Cursor<'t> {
    toks: &'t [(Tok, usize)],
    pos: usize,
    line: usize,
    end_col: usize,
}

impl<'t> Cursor<'t> {
    fn here(&self) -> usize {
        self.toks.get(self.pos).map(|t| t.1).unwrap_or(self.end_col)
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn error(&self, expected: &str) -> ParseError {
        let found = match self.peek() {
            Some(t) => t.describe(),
            None => "end of line".into(),
        };
        err(self.line, self.here(), format!("expected {expected}, found {found}"))
    }

    fn ident(&mut self, what: &str) -> Result<(String, usize), ParseError> {
        match self.toks.get(self.pos) {
            Some((Tok::Ident(s), col)) => {
                self.pos += 1;
                Ok((s.clone(), *col))
            }
            _ => Err(self.error(what)),
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&tok.describe()))
        }
    }

    fn integer(&mut self) -> Result<u64, ParseError> {
        let col = self.here();
        match self.toks.get(self.pos) {
            Some((Tok::Ident(s), _)) if s.bytes().all(|b| b.is_ascii_digit()) => {
                self.pos += 1;
                s.parse()
                    .map_err(|_| err(self.line, col, format!("integer `{s}` is too large")))
            }
            _ => Err(self.error("an integer")),
        }
    }

    fn rest_idents(&mut self, what: &str) -> Result<Vec<String>, ParseError> {
        let mut out = Vec::new();
        while self.peek().is_some() {
            out.push(self.ident(what)?.0);
        }
        Ok(out)
    }

    fn finish(&self) -> Result<(), ParseError> {
        if self.peek().is_some() {
            Err(self.error("end of line"))
        } else {
            Ok(())
        }
    }
}

#[derive(Default)]
struct Decls {
    name: Option<String>,
    alphabet: Option<Vec<String>>,
    clock: Option<(String, SourceSpan)>,
    locations: Option<Vec<String>>,
    initial: Option<String>,
    accepting: Option<Vec<String>>,
    edges: Vec<Edge>,
    /// Clock names used in guards and resets, to check once `clock` is known.
    clock_uses: Vec<(String, SourceSpan)>,
}

fn once<T>(slot: &mut Option<T>, value: T, line: usize, keyword: &str) -> Result<(), ParseError> {
    if slot.is_some() {
        return Err(err(line, 1, format!("duplicate `{keyword}` declaration")));
    }
    *slot = Some(value);
    Ok(())
}

fn parse_guard(cur: &mut Cursor<'_>, d: &mut Decls) -> Result<Guard, ParseError> {
    cur.expect(Tok::LBracket)?;
    if cur.peek() == Some(&Tok::Ident("true".into())) {
        cur.pos += 1;
        cur.expect(Tok::RBracket)?;
        return Ok(Guard::TRUE);
    }
    let mut atoms = Vec::new();
    loop {
        let (clock, col) = cur.ident("a clock name")?;
        d.clock_uses.push((clock, SourceSpan { line: cur.line, column: col }));
        let op = match cur.peek() {
            Some(Tok::Op(op)) => *op,
            _ => return Err(cur.error("a comparison operator")),
        };
        cur.pos += 1;
        atoms.push((op, cur.integer()?));
        match cur.peek() {
            Some(Tok::Amp) => cur.pos += 1,
            _ => break,
        }
    }
    cur.expect(Tok::RBracket)?;
    Ok(normalize_guard(&atoms))
}

fn parse_line(toks: &[(Tok, usize)], line: usize, end_col: usize, d: &mut Decls) -> Result<(), ParseError> {
    let mut cur = Cursor {
        toks,
        pos: 0,
        line,
        end_col,
    };
    let (keyword, _) = cur.ident("a declaration keyword")?;
    match keyword.as_str() {
        "automaton" => {
            let name = cur.ident("an automaton name")?.0;
            cur.finish()?;
            once(&mut d.name, name, line, "automaton")
        }
        "alphabet" => {
            let letters = cur.rest_idents("a letter")?;
            if letters.is_empty() {
                return Err(cur.error("at least one letter"));
            }
            once(&mut d.alphabet, letters, line, "alphabet")
        }
        "clock" => {
            let (name, col) = cur.ident("a clock name")?;
            cur.finish()?;
            once(&mut d.clock, (name, SourceSpan { line, column: col }), line, "clock")
        }
        "locations" => {
            let locs = cur.rest_idents("a location")?;
            if locs.is_empty() {
                return Err(cur.error("at least one location"));
            }
            once(&mut d.locations, locs, line, "locations")
        }
        "init" => {
            let loc = cur.ident("a location")?.0;
            cur.finish()?;
            once(&mut d.initial, loc, line, "init")
        }
        "accepting" => {
            let locs = cur.rest_idents("a location")?;
            once(&mut d.accepting, locs, line, "accepting")
        }
        "edge" => {
            let src = cur.ident("a source location")?.0;
            cur.expect(Tok::Arrow)?;
            let dst = cur.ident("a target location")?.0;
            cur.expect(Tok::Colon)?;
            let letter = cur.ident("a letter")?.0;
            let guard = parse_guard(&mut cur, d)?;
            let mut reset = false;
            if cur.peek().is_some() {
                let (kw, col) = cur.ident("`reset`")?;
                if kw != "reset" {
                    return Err(err(line, col, format!("expected `reset`, found `{kw}`")));
                }
                let (clock, col) = cur.ident("a clock name")?;
                d.clock_uses.push((clock, SourceSpan { line, column: col }));
                reset = true;
            }
            cur.finish()?;
            d.edges.push(Edge::new(src, dst, letter, guard, reset));
            Ok(())
        }
        other => Err(err(line, 1, format!("unknown declaration `{other}`"))),
    }
}

/// Parses the text format. Structural problems such as unknown locations
/// are left to [`crate::validate_wellformed`].
pub fn parse_automaton(text: &str) -> Result<Automaton, ParseError> {
    let mut d = Decls::default();
    let mut last_line = 0;
    for (i, raw) in text.lines().enumerate() {
        last_line = i + 1;
        let toks = lex_line(raw, i + 1)?;
        if toks.is_empty() {
            continue;
        }
        parse_line(&toks, i + 1, raw.chars().count() + 1, &mut d)?;
    }
    let eof = |what: &str| err(last_line + 1, 1, format!("missing `{what}` declaration"));
    let name = d.name.ok_or_else(|| eof("automaton"))?;
    let alphabet = d.alphabet.ok_or_else(|| eof("alphabet"))?;
    let (clock, _) = d.clock.ok_or_else(|| eof("clock"))?;
    let locations = d.locations.ok_or_else(|| eof("locations"))?;
    let initial = d.initial.ok_or_else(|| eof("init"))?;
    if let Some((used, span)) = d.clock_uses.iter().find(|(c, _)| *c != clock) {
        return Err(ParseError {
            span: *span,
            message: format!("unknown clock `{used}` (declared clock is `{clock}`)"),
        });
    }
    Ok(Automaton::builder(name)
        .alphabet(alphabet)
        .clock(clock)
        .locations(locations)
        .initial(initial)
        .accepting(d.accepting.unwrap_or_default())
        .edges(d.edges)
        .build())
}

fn edge_line(a: &Automaton, e: &Edge) -> String {
    let mut s = format!(
        "edge {} -> {} : {} [{}]",
        e.src,
        e.dst,
        e.letter,
        e.guard.display(a.clock())
    );
    if e.reset {
        write!(s, " reset {}", a.clock()).expect("write to string");
    }
    s
}

/// Canonical text: declarations in grammar order, edges sorted.
pub fn print_automaton(a: &Automaton) -> String {
    let mut out = String::new();
    let join = |v: &[String]| v.join(" ");
    let accepting: Vec<String> = a
        .locations()
        .iter()
        .filter(|l| a.is_accepting(l))
        .cloned()
        .chain(
            a.accepting()
                .iter()
                .filter(|l| !a.locations().contains(l))
                .cloned(),
        )
        .collect();
    let _ = writeln!(out, "automaton {}", a.name());
    let _ = writeln!(out, "alphabet {}", join(a.alphabet()));
    let _ = writeln!(out, "clock {}", a.clock());
    let _ = writeln!(out, "locations {}", join(a.locations()));
    let _ = writeln!(out, "init {}", a.initial());
    if accepting.is_empty() {
        out.push_str("accepting\n");
    } else {
        let _ = writeln!(out, "accepting {}", join(&accepting));
    }
    for e in a.sorted_edges() {
        out.push_str(&edge_line(a, &e));
        out.push('\n');
    }
    out
}

pub fn parse_timed_word(text: &str) -> Result<TimedWord, Error> {
    parse_timed_word_with(text, Monotonicity::Weak)
}

/// Parses whitespace-separated `LETTER@TIME` events, `TIME` being `INT`
/// or `INT/INT`.
pub fn parse_timed_word_with(text: &str, mode: Monotonicity) -> Result<TimedWord, Error> {
    let mut events = Vec::new();
    for (li, line) in text.lines().enumerate() {
        let mut col = 0;
        for tok in line.split_whitespace() {
            col += line[col..].find(tok).expect("token comes from this line");
            let span = |offset: usize| SourceSpan {
                line: li + 1,
                column: line[..col + offset].chars().count() + 1,
            };
            let (letter, time) = tok.split_once('@').ok_or_else(|| ParseError {
                span: span(0),
                message: format!("expected LETTER@TIME, found `{tok}`"),
            })?;
            if letter.is_empty() || !letter.chars().all(is_ident_char) {
                return Err(ParseError {
                    span: span(0),
                    message: format!("invalid letter `{letter}`"),
                }
                .into());
            }
            let time: Rational = time.parse().map_err(|e: Error| ParseError {
                span: span(letter.len() + 1),
                message: e.to_string(),
            })?;
            events.push((letter.to_string(), time));
            col += tok.len();
        }
    }
    TimedWord::with_monotonicity(events, mode)
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Graphviz digraph: accepting locations double-circled, initial location
/// fed by an arrow from an invisible point node.
pub fn to_dot(a: &Automaton) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "digraph {} {{", quote(a.name()));
    out.push_str("  rankdir=LR;\n");
    out.push_str("  __init [shape=point, label=\"\"];\n");
    for l in a.locations() {
        let shape = if a.is_accepting(l) { "doublecircle" } else { "circle" };
        let _ = writeln!(out, "  {} [shape={shape}];", quote(l));
    }
    let _ = writeln!(out, "  __init -> {};", quote(a.initial()));
    for e in a.sorted_edges() {
        let mut label = format!("{}, {}", e.letter, e.guard.display(a.clock()));
        if e.reset {
            label.push_str(", reset");
        }
        let _ = writeln!(out, "  {} -> {} [label={}];", quote(&e.src), quote(&e.dst), quote(&label));
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::guard::Region;

    const FIGURE_A: &str = "\
# the five timed transitions
automaton A
alphabet b c e
clock x
locations S
init S
accepting S

edge S -> S : b [x == 1] reset x
edge S -> S : b [x >= 1]
edge S -> S : c [x == 1] reset x
edge S -> S : c [x > 1]
edge S -> S : e [x >= 1]
";

    fn header(edge: &str) -> String {
        format!("automaton T\nalphabet b\nclock x\nlocations S\ninit S\naccepting S\n{edge}\n")
    }

    #[test]
    fn parses_figure() {
        let a = parse_automaton(FIGURE_A).unwrap();
        assert_eq!(a.locations().len(), 1);
        assert_eq!(a.edges().len(), 5);
        assert_eq!(a.max_const(), 1);
        assert_eq!(a.edges()[0].guard, Guard::point(1));
        assert!(a.edges()[0].reset);
        assert_eq!(a.edges()[3].guard, Guard::greater_than(1));
    }

    #[test]
    fn true_guard() {
        let a = parse_automaton(&header("edge S -> S : b [true]")).unwrap();
        assert_eq!(a.edges()[0].guard, Guard::TRUE);
    }

    #[test]
    fn missing_integer() {
        let e = parse_automaton(&header("edge S -> S : b [x == ]")).unwrap_err();
        assert_eq!(e.span, SourceSpan { line: 7, column: 23 });
        assert!(e.message.contains("integer"), "{}", e.message);
    }

    #[test]
    fn errors_carry_spans() {
        let e = parse_automaton(&header("edge S => S : b [true]")).unwrap_err();
        assert_eq!(e.span.line, 7);
        let e = parse_automaton(&header("edge S -> S : b [y > 1]")).unwrap_err();
        assert_eq!(e.span, SourceSpan { line: 7, column: 18 });
        let e = parse_automaton("automaton T\n").unwrap_err();
        assert_eq!(e.span, SourceSpan { line: 2, column: 1 });
        let e = parse_automaton(&format!("{}clock y\n", header(""))).unwrap_err();
        assert!(e.message.contains("duplicate"));
        let e = parse_automaton(&header("edge S -> S : b [true] resets x")).unwrap_err();
        assert_eq!(e.span.column, 24);
    }

    #[test]
    fn compact_spacing() {
        let a = parse_automaton(&header("edge S->S:b[x>=1&x<2]")).unwrap();
        assert_eq!(a.edges()[0].guard, Guard::interval(1, true, Some((2, false))));
    }

    #[test]
    fn semantic_errors_are_deferred() {
        let a = parse_automaton(&header("edge S -> T : z [true]")).unwrap();
        assert_eq!(crate::model::validate_wellformed(&a).issues.len(), 2);
    }

    #[test]
    fn prints_canonically() {
        let a = parse_automaton(FIGURE_A).unwrap();
        let text = print_automaton(&a);
        assert!(text.contains("edge S -> S : b [x == 1] reset x\n"));
        assert!(!text.contains("x >= 1 & x <= 1"));
        assert_eq!(parse_automaton(&text).unwrap(), a);
        // printing is a fixed point
        assert_eq!(print_automaton(&parse_automaton(&text).unwrap()), text);
    }

    #[test]
    fn prints_point_guards_as_equality() {
        let a = parse_automaton(&header("edge S -> S : b [x >= 1 & x <= 1]")).unwrap();
        assert!(print_automaton(&a).contains("[x == 1]"));
        let b = parse_automaton(&header("edge S -> S : b [x > 0 & x < 1]")).unwrap();
        assert_eq!(b.edges()[0].guard, Region::OpenUnit(0).guard());
    }

    #[test]
    fn word_examples() {
        let w = parse_timed_word("b@1 c@3/2").unwrap();
        assert_eq!(w.to_string(), "b@1 c@3/2");
        assert_eq!(w.events()[1].time, Rational::new(3, 2).unwrap());
        assert!(parse_timed_word("").unwrap().is_empty());
        assert!(parse_timed_word("   ").unwrap().is_empty());
        assert!(matches!(
            parse_timed_word("b@2 c@1"),
            Err(Error::NonMonotoneTime { index: 1 })
        ));
    }

    #[test]
    fn word_errors() {
        match parse_timed_word("b@1  c@1.5") {
            Err(Error::Parse(e)) => assert_eq!(e.span, SourceSpan { line: 1, column: 8 }),
            other => panic!("{other:?}"),
        }
        match parse_timed_word("b@1 c") {
            Err(Error::Parse(e)) => assert_eq!(e.span.column, 5),
            other => panic!("{other:?}"),
        }
        assert!(parse_timed_word("b@1/0").is_err());
        assert!(matches!(
            parse_timed_word_with("b@1 b@1", Monotonicity::Strict),
            Err(Error::NonMonotoneTime { index: 1 })
        ));
    }

    #[test]
    fn dot_export() {
        let a = parse_automaton(FIGURE_A).unwrap();
        let dot = to_dot(&a);
        assert!(dot.starts_with("digraph \"A\" {"));
        assert!(dot.contains("\"S\" [shape=doublecircle];"));
        assert_eq!(dot.matches("\"S\" -> \"S\"").count(), 5);
        assert!(dot.contains("label=\"b, x == 1, reset\""));

        let empty = Automaton::builder("E").alphabet(["a"]).locations(["p"]).build();
        let dot = to_dot(&empty);
        assert!(dot.contains("\"p\" [shape=circle];"));
        assert_eq!(dot.matches(" -> ").count(), 1);
    }
}
