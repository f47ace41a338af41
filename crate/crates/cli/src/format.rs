//! The `.hga` automaton format and the `.word` timed-word format.
//!
//! ```text
//! # comments run to the end of the line
//! mode: hourglass                  # or `extended`; optional
//! clocks: x=7, y=11
//! actions: boil, done              # optional; defaults to the labels used
//! locations: start, end
//! initial: start
//! final: end                       # optional; may be empty
//! invariant start: y <= cx
//! trans start -> end on done when x >= cx & y > 0 flip {x} toggle {y}
//! ```
//!
//! Guards are `&`-joined atoms `clock op rhs` with `op` one of `<`, `<=`,
//! `==`, `>=`, `>` and `rhs` either `0`, `cx`, or (extended mode, or equal
//! to the clock's bound) an integer. `true` is the empty guard.
//!
//! Words hold one step per line: `delay <rational>` or `action <label>`.
//! Consecutive delays add up; every delay must be followed by an action.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use hourglass::model::ClockDecl;
use hourglass::{
    AutomatonBuilder, ClockId, ClockSet, ConstRef, Guard, GuardAtom, HourglassAutomaton, LocId, Mode, Relation, Scalar,
    TimedMove, TimedWord, Transition,
};

/// Position of a token: 1-based line and column (in characters) and the
/// byte offset from the start of the input.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct SourceSpan {
    pub line: usize,
    pub column: usize,
    pub offset: usize,
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub span: SourceSpan,
    pub message: String,
    pub expected: Option<String>,
}

impl ParseError {
    fn new(span: SourceSpan, message: impl Into<String>) -> Self {
        ParseError { span, message: message.into(), expected: None }
    }

    fn expected(span: SourceSpan, message: impl Into<String>, expected: impl Into<String>) -> Self {
        ParseError { span, message: message.into(), expected: Some(expected.into()) }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.span, self.message)?;
        if let Some(e) = &self.expected {
            write!(f, " (expected {e})")?;
        }
        Ok(())
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Ident,
    Int,
    Sym,
}

#[derive(Debug, Clone, Copy)]
struct Token<'a> {
    kind: Kind,
    text: &'a str,
    span: SourceSpan,
}

const SYMBOLS: [&str; 12] = ["->", "<=", ">=", "==", "<", ">", "=", "&", "{", "}", ",", ":"];

fn lex_line(line: &str, line_no: usize, base: usize) -> Result<Vec<Token<'_>>, ParseError> {
    let mut tokens = Vec::new();
    let chars: Vec<(usize, char)> = line.char_indices().collect();
    let span_at =
        |i: usize| SourceSpan { line: line_no, column: i + 1, offset: base + chars.get(i).map_or(line.len(), |c| c.0) };
    let byte_at = |i: usize| chars.get(i).map_or(line.len(), |c| c.0);
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i].1;
        if c == '#' {
            break;
        }
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let kind = if c.is_ascii_alphabetic() || c == '_' {
            while i < chars.len() && (chars[i].1.is_ascii_alphanumeric() || chars[i].1 == '_') {
                i += 1;
            }
            Kind::Ident
        } else if c.is_ascii_digit() {
            while i < chars.len() && chars[i].1.is_ascii_digit() {
                i += 1;
            }
            Kind::Int
        } else {
            let rest = &line[chars[i].0..];
            let Some(sym) = SYMBOLS.iter().find(|s| rest.starts_with(**s)) else {
                return Err(ParseError::new(span_at(i), format!("unexpected character `{c}`")));
            };
            i += sym.chars().count();
            Kind::Sym
        };
        tokens.push(Token { kind, text: &line[byte_at(start)..byte_at(i)], span: span_at(start) });
    }
    Ok(tokens)
}

struct Cursor<'t, 'a> {
    tokens: &'t [Token<'a>],
    pos: usize,
    end: SourceSpan,
}

impl<'a> Cursor<'_, 'a> {
    fn peek(&self) -> Option<Token<'a>> {
        self.tokens.get(self.pos).copied()
    }

    fn here(&self) -> SourceSpan {
        self.peek().map_or(self.end, |t| t.span)
    }

    fn found(&self) -> String {
        self.peek().map_or("end of line".to_string(), |t| format!("`{}`", t.text))
    }

    fn eat_sym(&mut self, sym: &str) -> bool {
        if self.peek().is_some_and(|t| t.kind == Kind::Sym && t.text == sym) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn sym(&mut self, sym: &str) -> Result<(), ParseError> {
        if self.eat_sym(sym) {
            Ok(())
        } else {
            Err(ParseError::expected(self.here(), format!("unexpected {}", self.found()), format!("`{sym}`")))
        }
    }

    fn ident(&mut self, what: &str) -> Result<Token<'a>, ParseError> {
        match self.peek() {
            Some(t) if t.kind == Kind::Ident => {
                self.pos += 1;
                Ok(t)
            }
            _ => Err(ParseError::expected(self.here(), format!("unexpected {}", self.found()), what)),
        }
    }

    fn keyword(&mut self, word: &str) -> Result<(), ParseError> {
        match self.peek() {
            Some(t) if t.kind == Kind::Ident && t.text == word => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(ParseError::expected(self.here(), format!("unexpected {}", self.found()), format!("`{word}`"))),
        }
    }

    fn int(&mut self, what: &str) -> Result<(u32, Token<'a>), ParseError> {
        match self.peek() {
            Some(t) if t.kind == Kind::Int => {
                self.pos += 1;
                let value = t
                    .text
                    .parse()
                    .map_err(|_| ParseError::new(t.span, format!("integer `{}` is out of range", t.text)))?;
                Ok((value, t))
            }
            _ => Err(ParseError::expected(self.here(), format!("unexpected {}", self.found()), what)),
        }
    }

    fn finish(&self) -> Result<(), ParseError> {
        match self.peek() {
            None => Ok(()),
            Some(t) => Err(ParseError::expected(t.span, format!("unexpected `{}`", t.text), "end of line")),
        }
    }

    /// Comma-separated identifiers up to the end of the line (maybe none).
    fn ident_list(&mut self, what: &str) -> Result<Vec<Token<'a>>, ParseError> {
        let mut out = Vec::new();
        if self.peek().is_none() {
            return Ok(out);
        }
        loop {
            out.push(self.ident(what)?);
            if !self.eat_sym(",") {
                return Ok(out);
            }
        }
    }

    /// `{a, b}` or `{}`.
    fn braced_list(&mut self) -> Result<Vec<Token<'a>>, ParseError> {
        self.sym("{")?;
        let mut out = Vec::new();
        if self.eat_sym("}") {
            return Ok(out);
        }
        loop {
            out.push(self.ident("a clock name")?);
            if self.eat_sym("}") {
                return Ok(out);
            }
            self.sym(",")?;
        }
    }
}

struct RawAtom<'a> {
    clock: Token<'a>,
    relation: Relation,
    rhs: Token<'a>,
}

fn parse_guard<'a>(c: &mut Cursor<'_, 'a>) -> Result<Vec<RawAtom<'a>>, ParseError> {
    if c.peek().is_some_and(|t| t.kind == Kind::Ident && t.text == "true") {
        c.pos += 1;
        return Ok(Vec::new());
    }
    let mut atoms = Vec::new();
    loop {
        let clock = c.ident("a clock name")?;
        let relation = match c.peek() {
            Some(t) if t.kind == Kind::Sym => match t.text {
                "<" => Relation::Lt,
                "<=" => Relation::Le,
                "==" => Relation::Eq,
                ">=" => Relation::Ge,
                ">" => Relation::Gt,
                _ => {
                    return Err(ParseError::expected(t.span, format!("unexpected `{}`", t.text), "<, <=, ==, >= or >"))
                }
            },
            _ => return Err(ParseError::expected(c.here(), format!("unexpected {}", c.found()), "<, <=, ==, >= or >")),
        };
        c.pos += 1;
        let rhs = match c.peek() {
            Some(t) if t.kind == Kind::Int || (t.kind == Kind::Ident && t.text == "cx") => t,
            _ => {
                return Err(ParseError::expected(
                    c.here(),
                    format!("unexpected {}", c.found()),
                    "`0`, `cx` or an integer",
                ))
            }
        };
        c.pos += 1;
        atoms.push(RawAtom { clock, relation, rhs });
        if !c.eat_sym("&") {
            return Ok(atoms);
        }
    }
}

struct RawTransition<'a> {
    source: Token<'a>,
    target: Token<'a>,
    action: Token<'a>,
    guard: Vec<RawAtom<'a>>,
    flips: Vec<Token<'a>>,
    toggles: Vec<Token<'a>>,
}

#[derive(Default)]
struct Raw<'a> {
    mode: Option<(Mode, SourceSpan)>,
    clocks: Option<Vec<(Token<'a>, u32, Token<'a>)>>,
    actions: Option<Vec<Token<'a>>>,
    locations: Option<Vec<Token<'a>>>,
    initial: Option<Vec<Token<'a>>>,
    finals: Option<Vec<Token<'a>>>,
    invariants: Vec<(Token<'a>, Vec<RawAtom<'a>>)>,
    transitions: Vec<RawTransition<'a>>,
}

const DIRECTIVES: &str = "`mode:`, `clocks:`, `actions:`, `locations:`, `initial:`, `final:`, `invariant` or `trans`";

fn set_once<T>(slot: &mut Option<T>, value: T, head: Token<'_>) -> Result<(), ParseError> {
    if slot.is_some() {
        return Err(ParseError::new(head.span, format!("duplicate `{}:` line", head.text)));
    }
    *slot = Some(value);
    Ok(())
}

fn parse_line<'a>(raw: &mut Raw<'a>, c: &mut Cursor<'_, 'a>) -> Result<(), ParseError> {
    let head = c.ident(DIRECTIVES)?;
    match head.text {
        "mode" => {
            c.sym(":")?;
            let m = c.ident("`hourglass` or `extended`")?;
            let mode = match m.text {
                "hourglass" => Mode::Hourglass,
                "extended" => Mode::Extended,
                other => {
                    return Err(ParseError::expected(
                        m.span,
                        format!("unknown mode `{other}`"),
                        "`hourglass` or `extended`",
                    ))
                }
            };
            set_once(&mut raw.mode, (mode, m.span), head)?;
        }
        "clocks" => {
            c.sym(":")?;
            let mut clocks = Vec::new();
            if c.peek().is_some() {
                loop {
                    let name = c.ident("a clock name")?;
                    c.sym("=")?;
                    let (bound, tok) = c.int("a bound")?;
                    clocks.push((name, bound, tok));
                    if !c.eat_sym(",") {
                        break;
                    }
                }
            }
            set_once(&mut raw.clocks, clocks, head)?;
        }
        "actions" | "locations" | "initial" | "final" => {
            c.sym(":")?;
            let names = c.ident_list("a name")?;
            let slot = match head.text {
                "actions" => &mut raw.actions,
                "locations" => &mut raw.locations,
                "initial" => &mut raw.initial,
                _ => &mut raw.finals,
            };
            set_once(slot, names, head)?;
        }
        "invariant" => {
            let loc = c.ident("a location name")?;
            c.sym(":")?;
            let guard = parse_guard(c)?;
            raw.invariants.push((loc, guard));
        }
        "trans" => {
            let source = c.ident("a location name")?;
            c.sym("->")?;
            let target = c.ident("a location name")?;
            c.keyword("on")?;
            let action = c.ident("an action label")?;
            let mut t =
                RawTransition { source, target, action, guard: Vec::new(), flips: Vec::new(), toggles: Vec::new() };
            let mut seen = BTreeSet::new();
            while let Some(word) = c.peek() {
                if word.kind != Kind::Ident || !matches!(word.text, "when" | "flip" | "toggle") {
                    return Err(ParseError::expected(
                        word.span,
                        format!("unexpected `{}`", word.text),
                        "`when`, `flip` or `toggle`",
                    ));
                }
                if !seen.insert(word.text) {
                    return Err(ParseError::new(word.span, format!("`{}` given twice", word.text)));
                }
                c.pos += 1;
                match word.text {
                    "when" => t.guard = parse_guard(c)?,
                    "flip" => t.flips = c.braced_list()?,
                    _ => t.toggles = c.braced_list()?,
                }
            }
            raw.transitions.push(t);
        }
        other => {
            return Err(ParseError::expected(head.span, format!("unknown directive `{other}`"), DIRECTIVES));
        }
    }
    c.finish()
}

struct Resolver {
    mode: Mode,
    clocks: HashMap<String, (ClockId, u32)>,
    locations: HashMap<String, LocId>,
}

impl Resolver {
    fn clock(&self, t: &Token<'_>) -> Result<(ClockId, u32), ParseError> {
        self.clocks
            .get(t.text)
            .copied()
            .ok_or_else(|| ParseError::new(t.span, format!("clock `{}` is not declared", t.text)))
    }

    fn location(&self, t: &Token<'_>) -> Result<LocId, ParseError> {
        self.locations
            .get(t.text)
            .copied()
            .ok_or_else(|| ParseError::new(t.span, format!("location `{}` is not declared", t.text)))
    }

    fn clock_set(&self, tokens: &[Token<'_>]) -> Result<ClockSet, ParseError> {
        tokens.iter().map(|t| self.clock(t).map(|(x, _)| x)).collect()
    }

    fn guard(&self, atoms: &[RawAtom<'_>]) -> Result<Guard, ParseError> {
        let mut out = Vec::new();
        for atom in atoms {
            let (x, bound) = self.clock(&atom.clock)?;
            let constant = if atom.rhs.text == "cx" {
                ConstRef::Cx
            } else {
                let k: u32 = atom.rhs.text.parse().map_err(|_| {
                    ParseError::new(atom.rhs.span, format!("integer `{}` is out of range", atom.rhs.text))
                })?;
                if k == 0 {
                    ConstRef::Zero
                } else if self.mode == Mode::Hourglass && k != bound {
                    return Err(ParseError::new(
                        atom.rhs.span,
                        format!(
                            "constant must be 0 or cx, found `{}` (use `mode: extended` for other integers)",
                            atom.rhs.text
                        ),
                    ));
                } else if k > bound {
                    return Err(ParseError::new(
                        atom.rhs.span,
                        format!("constant `{k}` exceeds the bound {bound} of clock `{}`", atom.clock.text),
                    ));
                } else {
                    ConstRef::Int(k)
                }
            };
            out.push(GuardAtom::new(x, atom.relation, constant));
        }
        Ok(Guard::from_atoms(out))
    }
}

fn resolve(raw: Raw<'_>, end: SourceSpan) -> Result<HourglassAutomaton, ParseError> {
    let missing =
        |what: &str| ParseError::expected(end, format!("missing `{what}:` line"), format!("a `{what}:` line"));
    let clock_decls = raw.clocks.ok_or_else(|| missing("clocks"))?;
    let location_decls = raw.locations.ok_or_else(|| missing("locations"))?;
    let initial = raw.initial.ok_or_else(|| missing("initial"))?;
    let mode = raw.mode.map_or(Mode::Hourglass, |(m, _)| m);

    let mut b = AutomatonBuilder::new(mode);
    let mut r = Resolver { mode, clocks: HashMap::new(), locations: HashMap::new() };
    for (name, bound, tok) in &clock_decls {
        if r.clocks.contains_key(name.text) {
            return Err(ParseError::new(name.span, format!("clock `{}` declared twice", name.text)));
        }
        if *bound == 0 {
            return Err(ParseError::new(tok.span, format!("clock `{}` needs a bound of at least 1", name.text)));
        }
        let x = b.clock(name.text, *bound).map_err(|e| ParseError::new(name.span, e.to_string()))?;
        r.clocks.insert(name.text.to_string(), (x, *bound));
    }
    for name in &location_decls {
        if r.locations.contains_key(name.text) {
            return Err(ParseError::new(name.span, format!("location `{}` declared twice", name.text)));
        }
        let l = b.location(name.text).map_err(|e| ParseError::new(name.span, e.to_string()))?;
        r.locations.insert(name.text.to_string(), l);
    }
    for t in &initial {
        let l = r.location(t)?;
        b.initial(l);
    }
    for t in raw.finals.iter().flatten() {
        let l = r.location(t)?;
        b.final_location(l);
    }
    let declared: Option<BTreeSet<&str>> = raw.actions.as_ref().map(|a| a.iter().map(|t| t.text).collect());
    for t in raw.actions.iter().flatten() {
        b.action(t.text);
    }
    for (loc, atoms) in &raw.invariants {
        let l = r.location(loc)?;
        let g = r.guard(atoms)?;
        b.invariant(l, g);
    }
    for t in &raw.transitions {
        if declared.as_ref().is_some_and(|d| !d.contains(t.action.text)) {
            return Err(ParseError::new(
                t.action.span,
                format!("action `{}` is not listed in `actions:`", t.action.text),
            ));
        }
        let tr = Transition::new(r.location(&t.source)?, t.action.text, r.location(&t.target)?)
            .when(r.guard(&t.guard)?)
            .flip(r.clock_set(&t.flips)?)
            .toggle(r.clock_set(&t.toggles)?);
        b.transition(tr);
    }
    b.build().map_err(|e| ParseError::new(SourceSpan { line: 1, column: 1, offset: 0 }, e.to_string()))
}

fn end_span(text: &str) -> SourceSpan {
    let line = text.lines().count().max(1);
    let last = text.lines().last().unwrap_or("");
    SourceSpan { line, column: last.chars().count() + 1, offset: text.len() }
}

/// Parses and validates an automaton description.
pub fn parse_automaton(text: &str) -> Result<HourglassAutomaton, ParseError> {
    let text = text.strip_prefix('\u{feff}').unwrap_or(text);
    let mut lines = Vec::new();
    let mut offset = 0;
    for (i, line) in text.split('\n').enumerate() {
        let body = line.strip_suffix('\r').unwrap_or(line);
        lines.push((i + 1, offset, body));
        offset += line.len() + 1;
    }
    let mut token_lines = Vec::new();
    for &(no, base, body) in &lines {
        let tokens = lex_line(body, no, base)?;
        if !tokens.is_empty() {
            let end = SourceSpan { line: no, column: body.chars().count() + 1, offset: base + body.len() };
            token_lines.push((tokens, end));
        }
    }
    let mut raw = Raw::default();
    for (tokens, end) in &token_lines {
        let mut c = Cursor { tokens, pos: 0, end: *end };
        parse_line(&mut raw, &mut c)?;
    }
    resolve(raw, end_span(text))
}

/// [`parse_automaton`] on raw bytes, rejecting invalid UTF-8 with a span.
pub fn parse_automaton_bytes(bytes: &[u8]) -> Result<HourglassAutomaton, ParseError> {
    match std::str::from_utf8(bytes) {
        Ok(text) => parse_automaton(text),
        Err(e) => {
            let valid = std::str::from_utf8(&bytes[..e.valid_up_to()]).unwrap_or("");
            let mut span = end_span(valid);
            if valid.ends_with('\n') {
                span = SourceSpan { line: span.line + 1, column: 1, offset: valid.len() };
            }
            Err(ParseError::new(span, "input is not valid UTF-8"))
        }
    }
}

fn write_guard(out: &mut String, a: &HourglassAutomaton, g: &Guard) {
    let atoms: Vec<String> = g
        .atoms()
        .iter()
        .map(|atom| {
            let rhs = match atom.constant {
                ConstRef::Zero => "0".to_string(),
                ConstRef::Cx => "cx".to_string(),
                ConstRef::Int(k) => k.to_string(),
            };
            format!("{} {} {rhs}", a.clock_name(atom.clock), atom.relation.symbol())
        })
        .collect();
    out.push_str(&atoms.join(" & "));
}

fn names(a: &HourglassAutomaton, set: &BTreeSet<LocId>) -> String {
    set.iter().map(|&l| a.location_name(l)).collect::<Vec<_>>().join(", ")
}

fn clock_names(a: &HourglassAutomaton, set: &ClockSet) -> String {
    set.iter().map(|&x| a.clock_name(x)).collect::<Vec<_>>().join(", ")
}

fn header(label: &str, items: &str) -> String {
    if items.is_empty() {
        format!("{label}:\n")
    } else {
        format!("{label}: {items}\n")
    }
}

/// Canonical text: declaration order for clocks and locations (their order
/// fixes their identity), sorted actions, transitions in order.
pub fn serialize_automaton(a: &HourglassAutomaton) -> String {
    let mut out = String::new();
    out.push_str(match a.mode() {
        Mode::Hourglass => "mode: hourglass\n",
        Mode::Extended => "mode: extended\n",
    });
    let clocks: Vec<String> = a.clocks().iter().map(|ClockDecl { name, bound }| format!("{name}={bound}")).collect();
    out.push_str(&header("clocks", &clocks.join(", ")));
    out.push_str(&header("actions", &a.actions().iter().cloned().collect::<Vec<_>>().join(", ")));
    out.push_str(&header("locations", &a.locations().join(", ")));
    out.push_str(&header("initial", &names(a, a.initial())));
    out.push_str(&header("final", &names(a, a.finals())));
    for (i, g) in a.invariants().iter().enumerate() {
        if !g.is_true() {
            out.push_str(&format!("invariant {}: ", a.location_name(LocId(i))));
            write_guard(&mut out, a, g);
            out.push('\n');
        }
    }
    for t in a.transitions() {
        out.push_str(&format!("trans {} -> {} on {}", a.location_name(t.source), a.location_name(t.target), t.action));
        if !t.guard.is_true() {
            out.push_str(" when ");
            write_guard(&mut out, a, &t.guard);
        }
        if !t.flips.is_empty() {
            out.push_str(&format!(" flip {{{}}}", clock_names(a, &t.flips)));
        }
        if !t.toggles.is_empty() {
            out.push_str(&format!(" toggle {{{}}}", clock_names(a, &t.toggles)));
        }
        out.push('\n');
    }
    out
}

/// Parses a timed word.
pub fn parse_word<T: Scalar>(text: &str) -> Result<TimedWord<T>, ParseError> {
    let mut moves = Vec::new();
    let mut pending: Option<(T, SourceSpan)> = None;
    let mut offset = 0;
    for (i, line) in text.split('\n').enumerate() {
        let base = offset;
        offset += line.len() + 1;
        let body = line.split('#').next().unwrap_or("");
        let mut words = body.split_whitespace();
        let Some(keyword) = words.next() else { continue };
        let span_of = |word: &str| {
            let byte = word.as_ptr() as usize - body.as_ptr() as usize;
            SourceSpan { line: i + 1, column: body[..byte].chars().count() + 1, offset: base + byte }
        };
        let arg = words.next();
        if let Some(extra) = words.next() {
            return Err(ParseError::expected(span_of(extra), format!("unexpected `{extra}`"), "end of line"));
        }
        let line_end = SourceSpan {
            line: i + 1,
            column: body.trim_end().chars().count() + 1,
            offset: base + body.trim_end().len(),
        };
        match keyword {
            "delay" => {
                let Some(arg) = arg else {
                    return Err(ParseError::expected(line_end, "missing delay", "a rational such as `7/2` or `3.5`"));
                };
                let value = T::parse_exact(arg).map_err(|e| ParseError::new(span_of(arg), e.to_string()))?;
                if value < T::zero() {
                    return Err(ParseError::new(span_of(arg), format!("negative delay `{arg}`")));
                }
                pending = Some(match pending {
                    Some((d, s)) => (d + value, s),
                    None => (value, span_of(keyword)),
                });
            }
            "action" => {
                let Some(arg) = arg else {
                    return Err(ParseError::expected(line_end, "missing action label", "an action label"));
                };
                let delay = pending.take().map_or_else(T::zero, |(d, _)| d);
                moves.push(TimedMove { delay, action: arg.to_string() });
            }
            other => {
                return Err(ParseError::expected(
                    span_of(other),
                    format!("unknown step `{other}`"),
                    "`delay` or `action`",
                ));
            }
        }
    }
    if let Some((_, span)) = pending {
        return Err(ParseError::new(span, "delay at the end of the word is not followed by an action"));
    }
    Ok(TimedWord::new(moves))
}

/// One `delay`/`action` pair per move; zero delays are written too.
pub fn serialize_word<T: Scalar>(w: &TimedWord<T>) -> String {
    let mut out = String::new();
    for m in &w.moves {
        out.push_str(&format!("delay {}\naction {}\n", m.delay, m.action));
    }
    out
}
