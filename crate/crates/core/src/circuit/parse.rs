use super::{CircuitDescription, Element, Probability};
use crate::error::{ParseError, ParseErrorKind};

#[derive(Debug, Clone, Copy)]
struct Token<'a> {
    text: &'a str,
    column: usize,
}

fn tokenize(line: &str) -> Vec<Token<'_>> {
    let code = line.split('#').next().unwrap_or("");
    let mut tokens = Vec::new();
    let mut start = None;
    for (pos, (byte_idx, ch)) in code.char_indices().enumerate() {
        if ch.is_whitespace() {
            if let Some((b, col)) = start.take() {
                tokens.push(Token { text: &code[b..byte_idx], column: col });
            }
        } else if start.is_none() {
            start = Some((byte_idx, pos + 1));
        }
    }
    if let Some((b, col)) = start {
        tokens.push(Token { text: &code[b..], column: col });
    }
    tokens
}

struct LineCtx {
    line: usize,
}

impl LineCtx {
    fn err(&self, column: usize, kind: ParseErrorKind) -> ParseError {
        ParseError { line: self.line, column, kind }
    }

    fn syntax(&self, column: usize, msg: impl Into<String>) -> ParseError {
        self.err(column, ParseErrorKind::Syntax(msg.into()))
    }

    fn label<'a>(&self, tok: Token<'a>) -> Result<&'a str, ParseError> {
        if tok.text.contains('=') {
            return Err(self.syntax(tok.column, format!("expected a mode label, found `{}`", tok.text)));
        }
        Ok(tok.text)
    }

    fn declared(&self, tok: Token<'_>, modes: &[String]) -> Result<String, ParseError> {
        let label = self.label(tok)?;
        if modes.iter().any(|m| m == label) {
            Ok(label.to_owned())
        } else {
            Err(self.err(tok.column, ParseErrorKind::UndeclaredMode(label.to_owned())))
        }
    }

    fn pair(&self, a: Token<'_>, b: Token<'_>, modes: &[String]) -> Result<[String; 2], ParseError> {
        let (x, y) = (self.declared(a, modes)?, self.declared(b, modes)?);
        if x == y {
            return Err(self.syntax(b.column, format!("element acts twice on mode `{y}`")));
        }
        Ok([x, y])
    }

    fn keyword_number(&self, tok: Token<'_>, key: &str) -> Result<f64, ParseError> {
        let value = tok
            .text
            .strip_prefix(key)
            .and_then(|rest| rest.strip_prefix('='))
            .ok_or_else(|| self.syntax(tok.column, format!("expected `{key}=<number>`, found `{}`", tok.text)))?;
        let is_decimal =
            !value.is_empty() && value.chars().all(|c| c.is_ascii_digit() || matches!(c, '+' | '-' | '.' | 'e' | 'E'));
        match value.parse::<f64>() {
            Ok(v) if is_decimal && v.is_finite() => Ok(v),
            _ => Err(self.syntax(tok.column + key.len() + 1, format!("invalid number `{value}`"))),
        }
    }

    fn probability(&self, tok: Token<'_>, key: &'static str) -> Result<Probability, ParseError> {
        let v = self.keyword_number(tok, key)?;
        Probability::new(v, key)
            .map_err(|_| self.err(tok.column, ParseErrorKind::OutOfRange(format!("{key}={v} not in [0, 1]"))))
    }

    fn arity(&self, tokens: &[Token<'_>], expected: usize, usage: &str) -> Result<(), ParseError> {
        if tokens.len() == expected {
            return Ok(());
        }
        let column = tokens.get(expected).or(tokens.last()).map_or(1, |t| t.column);
        Err(self.syntax(column, format!("expected `{usage}`")))
    }
}

fn unique_labels(ctx: &LineCtx, tokens: &[Token<'_>]) -> Result<Vec<String>, ParseError> {
    let mut out: Vec<String> = Vec::with_capacity(tokens.len());
    for &t in tokens {
        let l = ctx.label(t)?;
        if out.iter().any(|o| o == l) {
            return Err(ctx.syntax(t.column, format!("mode `{l}` declared twice")));
        }
        out.push(l.to_owned());
    }
    Ok(out)
}

/// Parses the line-oriented circuit format.
///
/// ```text
/// modes a b c            # wire labels, required before any element
/// outputs x y z          # optional names of the wires after the network
/// prep a b R=0.5 phi=0   # sym a b | tomo a b Dp=.. theta=.. | phase a value=..
/// ```
pub fn parse_circuit(text: &str) -> Result<CircuitDescription, ParseError> {
    let mut modes: Option<Vec<String>> = None;
    let mut outputs: Option<Vec<String>> = None;
    let mut elements = Vec::new();
    let mut line_count = 0;

    for (n, line) in text.lines().enumerate() {
        line_count = n + 1;
        let ctx = LineCtx { line: n + 1 };
        let tokens = tokenize(line);
        let Some(head) = tokens.first().copied() else { continue };
        let args = &tokens[1..];

        if head.text == "modes" {
            if modes.is_some() {
                return Err(ctx.syntax(head.column, "second `modes` declaration"));
            }
            if args.is_empty() {
                return Err(ctx.syntax(head.column, "`modes` needs at least one label"));
            }
            modes = Some(unique_labels(&ctx, args)?);
            continue;
        }
        let Some(declared) = modes.as_deref() else {
            return Err(ctx.syntax(head.column, format!("`{}` before the `modes` declaration", head.text)));
        };
        let element = match head.text {
            "outputs" => {
                if outputs.is_some() || !elements.is_empty() {
                    return Err(ctx.syntax(head.column, "`outputs` must appear once, before any element"));
                }
                if args.len() != declared.len() {
                    return Err(ctx.syntax(
                        head.column,
                        format!("`outputs` names {} wires, `modes` declares {}", args.len(), declared.len()),
                    ));
                }
                outputs = Some(unique_labels(&ctx, args)?);
                continue;
            }
            "sym" => {
                ctx.arity(&tokens, 3, "sym <mode> <mode>")?;
                Element::Sym { modes: ctx.pair(args[0], args[1], declared)? }
            }
            "prep" => {
                ctx.arity(&tokens, 5, "prep <mode> <mode> R=<num> phi=<num>")?;
                Element::Prep {
                    modes: ctx.pair(args[0], args[1], declared)?,
                    reflection: ctx.probability(args[2], "R")?,
                    phi: ctx.keyword_number(args[3], "phi")?,
                }
            }
            "tomo" => {
                ctx.arity(&tokens, 5, "tomo <mode> <mode> Dp=<num> theta=<num>")?;
                Element::Tomo {
                    modes: ctx.pair(args[0], args[1], declared)?,
                    transmission: ctx.probability(args[2], "Dp")?,
                    theta: ctx.keyword_number(args[3], "theta")?,
                }
            }
            "phase" => {
                ctx.arity(&tokens, 3, "phase <mode> value=<num>")?;
                Element::Phase { mode: ctx.declared(args[0], declared)?, value: ctx.keyword_number(args[1], "value")? }
            }
            other => return Err(ctx.err(head.column, ParseErrorKind::UnknownElement(other.to_owned()))),
        };
        elements.push(element);
    }

    let modes = modes.ok_or_else(|| ParseError {
        line: line_count.max(1),
        column: 1,
        kind: ParseErrorKind::Syntax("missing `modes` declaration".into()),
    })?;
    Ok(CircuitDescription { modes, outputs, elements })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smallest_program() {
        let c = parse_circuit("modes a b\nsym a b\n").unwrap();
        assert_eq!(c.modes, ["a", "b"]);
        assert_eq!(c.elements, vec![Element::sym("a", "b")]);
    }

    #[test]
    fn prep_fields_map_directly() {
        let c = parse_circuit("modes a b\nprep a b R=0.5 phi=1.5708\n").unwrap();
        match &c.elements[0] {
            Element::Prep { reflection, phi, .. } => {
                assert_eq!(reflection.get(), 0.5);
                assert!((phi - std::f64::consts::FRAC_PI_2).abs() < 1e-4);
            }
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn comments_blank_lines_and_exponents() {
        let src = "# header\n\nmodes a b c   # three wires\nphase c value=-2.5e-1\ntomo a c Dp=5E-1 theta=0\n";
        let c = parse_circuit(src).unwrap();
        assert_eq!(c.elements.len(), 2);
        assert_eq!(c.elements[0], Element::phase("c", -0.25));
    }

    fn err(src: &str) -> ParseError {
        parse_circuit(src).unwrap_err()
    }

    #[test]
    fn undeclared_mode_has_position() {
        let e = err("modes a b\nsym a  zz\n");
        assert_eq!((e.line, e.column), (2, 8));
        assert_eq!(e.kind, ParseErrorKind::UndeclaredMode("zz".into()));
    }

    #[test]
    fn unknown_element() {
        let e = err("modes a b\n  mirror a b\n");
        assert_eq!((e.line, e.column), (2, 3));
        assert_eq!(e.kind, ParseErrorKind::UnknownElement("mirror".into()));
    }

    #[test]
    fn out_of_range_probability() {
        let e = err("modes a b\nprep a b R=1.5 phi=0\n");
        assert!(matches!(e.kind, ParseErrorKind::OutOfRange(_)));
        assert_eq!((e.line, e.column), (2, 10));
    }

    #[test]
    fn syntax_errors() {
        assert!(matches!(err("sym a b\n").kind, ParseErrorKind::Syntax(_)));
        assert!(matches!(err("").kind, ParseErrorKind::Syntax(_)));
        assert!(matches!(err("modes a b\nprep a b phi=0 R=0.5\n").kind, ParseErrorKind::Syntax(_)));
        assert!(matches!(err("modes a b\nprep a b R=0.5\n").kind, ParseErrorKind::Syntax(_)));
        assert!(matches!(err("modes a b\nphase a value=nan\n").kind, ParseErrorKind::Syntax(_)));
        assert!(matches!(err("modes a b\nphase a value=inf\n").kind, ParseErrorKind::Syntax(_)));
        assert!(matches!(err("modes a a\n").kind, ParseErrorKind::Syntax(_)));
        assert!(matches!(err("modes a b\nsym a a\n").kind, ParseErrorKind::Syntax(_)));
        assert!(matches!(err("modes a b\nmodes c\n").kind, ParseErrorKind::Syntax(_)));
        assert!(matches!(err("modes a b\noutputs x\n").kind, ParseErrorKind::Syntax(_)));
        assert!(matches!(err("modes a b\nsym a b\noutputs x y\n").kind, ParseErrorKind::Syntax(_)));
    }

    #[test]
    fn bad_number_points_at_value() {
        let e = err("modes a\nphase a value=1.2.3\n");
        assert_eq!((e.line, e.column), (2, 15));
    }
}
