use std::collections::BTreeSet;

use super::ast::*;
use super::lexer::{tokenize, Tok};
use super::{ParseError, ParseErrorKind};
use crate::demand::DeparturePolicy;
use crate::transit::DayType;

/// Parses an `HHMM` literal: exactly four digits, `HH <= 24`, `MM < 60`, at most `2400`.
pub fn parse_time_literal(s: &str) -> Option<u32> {
    if s.len() != 4 || !s.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let hh: u32 = s[..2].parse().ok()?;
    let mm: u32 = s[2..].parse().ok()?;
    if hh > 24 || mm >= 60 || hh * 100 + mm > 2400 {
        return None;
    }
    Some(hh * 3600 + mm * 60)
}

struct Parser {
    toks: Vec<(Tok, Span)>,
    pos: usize,
    eof: Span,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn span(&self) -> Span {
        self.toks.get(self.pos).map_or(self.eof, |(_, s)| *s)
    }

    fn err(&self, kind: ParseErrorKind, message: impl Into<String>) -> ParseError {
        ParseError::new(self.span(), kind, message)
    }

    fn found(&self) -> String {
        self.peek().map_or_else(|| "end of input".to_string(), Tok::describe)
    }

    fn next(&mut self) -> Option<(Tok, Span)> {
        let t = self.toks.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok) -> Result<Span, ParseError> {
        if self.peek() == Some(&want) {
            Ok(self.next().unwrap().1)
        } else {
            Err(self.err(
                ParseErrorKind::Syntax,
                format!("expected {}, found {}", want.describe(), self.found()),
            ))
        }
    }

    fn word(&mut self, what: &str) -> Result<(String, Span), ParseError> {
        match self.peek() {
            Some(Tok::Word(_)) => match self.next() {
                Some((Tok::Word(w), s)) => Ok((w, s)),
                _ => unreachable!(),
            },
            _ => Err(self.err(ParseErrorKind::Syntax, format!("expected {what}, found {}", self.found()))),
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<Span, ParseError> {
        let span = self.span();
        let (w, _) = self.word(&format!("`{kw}`"))?;
        if w != kw {
            return Err(ParseError::new(
                span,
                ParseErrorKind::UnknownKeyword,
                format!("expected `{kw}`, found `{w}`"),
            ));
        }
        Ok(span)
    }

    fn string(&mut self, what: &str) -> Result<(String, Span), ParseError> {
        match self.peek() {
            Some(Tok::Str(_)) => match self.next() {
                Some((Tok::Str(s), sp)) => Ok((s, sp)),
                _ => unreachable!(),
            },
            _ => Err(self.err(ParseErrorKind::Syntax, format!("expected {what}, found {}", self.found()))),
        }
    }

    fn ident(&mut self, what: &str) -> Result<String, ParseError> {
        match self.peek() {
            Some(Tok::Str(_)) => Ok(self.string(what)?.0),
            _ => Ok(self.word(what)?.0),
        }
    }

    fn time(&mut self) -> Result<(u32, Span), ParseError> {
        let (w, span) = self.word("time literal")?;
        parse_time_literal(&w).map(|t| (t, span)).ok_or_else(|| {
            ParseError::new(
                span,
                ParseErrorKind::MalformedTime,
                format!("`{w}` is not HHMM with HH <= 24, MM < 60, at most 2400"),
            )
        })
    }

    fn program(&mut self) -> Result<ScenarioProgram, ParseError> {
        let mut prog = ScenarioProgram::default();
        let mut ids = BTreeSet::new();
        while let Some(tok) = self.peek() {
            match tok {
                Tok::Word(w) if w == "import" => {
                    let decl = self.import()?;
                    prog.imports.push(decl);
                }
                Tok::Word(w) if w == "simulation" => {
                    let cfg = self.config()?;
                    if !ids.insert(cfg.id) {
                        return Err(ParseError::new(
                            cfg.span,
                            ParseErrorKind::DuplicateConfig,
                            format!("configuration {} declared twice", cfg.id),
                        ));
                    }
                    prog.configurations.push(cfg);
                }
                Tok::Word(w) => {
                    let msg = format!("unknown keyword `{w}` at top level");
                    return Err(self.err(ParseErrorKind::UnknownKeyword, msg));
                }
                _ => {
                    return Err(self.err(
                        ParseErrorKind::Syntax,
                        format!("expected `import` or `simulation`, found {}", self.found()),
                    ))
                }
            }
        }
        Ok(prog)
    }

    fn import(&mut self) -> Result<ImportDecl, ParseError> {
        let span = self.keyword("import")?;
        let (s, sspan) = self.string("quoted resource")?;
        let (kind, resource) = s.split_once('.').ok_or_else(|| {
            ParseError::new(sspan, ParseErrorKind::Syntax, format!("import \"{s}\" lacks a `kind.` prefix"))
        })?;
        let kind = ImportKind::parse(kind).ok_or_else(|| {
            ParseError::new(
                sspan,
                ParseErrorKind::UnknownKeyword,
                format!("unknown import kind `{kind}` (expected network, vehicle, gtfs or td)"),
            )
        })?;
        if resource.is_empty() {
            return Err(ParseError::new(sspan, ParseErrorKind::Syntax, "empty import resource"));
        }
        Ok(ImportDecl {
            kind,
            resource: resource.to_string(),
            span,
        })
    }

    fn config(&mut self) -> Result<SimulationConfig, ParseError> {
        let span = self.keyword("simulation")?;
        self.keyword("configuration")?;
        let id_span = self.span();
        let (id_word, _) = self.word("configuration id")?;
        let id = match id_word.parse::<u32>() {
            Ok(id) if id > 0 => id,
            _ => {
                return Err(ParseError::new(
                    id_span,
                    ParseErrorKind::Syntax,
                    format!("configuration id must be a positive integer, found `{id_word}`"),
                ))
            }
        };
        self.expect(Tok::LBrace)?;

        let mut time: Option<(u32, u32)> = None;
        let mut day: Option<DayType> = None;
        let mut period: Option<u32> = None;
        let mut assignments: Option<Vec<Assignment>> = None;
        let mut demand_scale: Option<f64> = None;
        let mut departure: Option<DeparturePolicy> = None;

        loop {
            let clause_span = self.span();
            let dup = |name: &str| {
                ParseError::new(clause_span, ParseErrorKind::Syntax, format!("duplicate `{name}` clause"))
            };
            match self.peek() {
                Some(Tok::RBrace) => {
                    self.next();
                    break;
                }
                Some(Tok::Word(w)) => match w.as_str() {
                    "time" => {
                        self.next();
                        if time.is_some() {
                            return Err(dup("time"));
                        }
                        self.expect(Tok::LBracket)?;
                        let (start, _) = self.time()?;
                        self.expect(Tok::Colon)?;
                        let (end, end_span) = self.time()?;
                        self.expect(Tok::RBracket)?;
                        if start >= 86_400 {
                            return Err(ParseError::new(
                                clause_span,
                                ParseErrorKind::MalformedTime,
                                "2400 is only allowed as an end bound",
                            ));
                        }
                        if end <= start {
                            return Err(ParseError::new(
                                end_span,
                                ParseErrorKind::MalformedTime,
                                "time window must end after it starts (spanning midnight is not supported)",
                            ));
                        }
                        time = Some((start, end));
                    }
                    "schedule" => {
                        self.next();
                        if day.is_some() {
                            return Err(dup("schedule"));
                        }
                        let vspan = self.span();
                        let (v, _) = self.word("`weekday` or `weekend`")?;
                        day = Some(match v.as_str() {
                            "weekday" => DayType::Weekday,
                            "weekend" => DayType::Weekend,
                            _ => {
                                return Err(ParseError::new(
                                    vspan,
                                    ParseErrorKind::UnknownKeyword,
                                    format!("expected `weekday` or `weekend`, found `{v}`"),
                                ))
                            }
                        });
                    }
                    "output_sampling_period" => {
                        self.next();
                        if period.is_some() {
                            return Err(dup("output_sampling_period"));
                        }
                        let vspan = self.span();
                        let (v, _) = self.word("sampling period in seconds")?;
                        period = Some(match v.parse::<u32>() {
                            Ok(p) if p >= 1 => p,
                            _ => {
                                return Err(ParseError::new(
                                    vspan,
                                    ParseErrorKind::Syntax,
                                    format!("output_sampling_period must be a positive integer, found `{v}`"),
                                ))
                            }
                        });
                    }
                    "demand_scale" => {
                        self.next();
                        if demand_scale.is_some() {
                            return Err(dup("demand_scale"));
                        }
                        let vspan = self.span();
                        let (v, _) = self.word("demand scale")?;
                        demand_scale = Some(v.parse::<f64>().ok().filter(|x| x.is_finite()).ok_or_else(|| {
                            ParseError::new(vspan, ParseErrorKind::Syntax, format!("malformed demand scale `{v}`"))
                        })?);
                    }
                    "departure" => {
                        self.next();
                        if departure.is_some() {
                            return Err(dup("departure"));
                        }
                        let vspan = self.span();
                        let (v, _) = self.word("`uniform` or `random`")?;
                        departure = Some(match v.as_str() {
                            "uniform" => DeparturePolicy::Uniform,
                            "random" => DeparturePolicy::Random,
                            _ => {
                                return Err(ParseError::new(
                                    vspan,
                                    ParseErrorKind::UnknownKeyword,
                                    format!("expected `uniform` or `random`, found `{v}`"),
                                ))
                            }
                        });
                    }
                    "vehicleassignment" => {
                        self.next();
                        if assignments.is_some() {
                            return Err(dup("vehicleassignment"));
                        }
                        assignments = Some(self.assignments()?);
                    }
                    other => {
                        let msg = format!("unknown keyword `{other}` in configuration {id}");
                        return Err(self.err(ParseErrorKind::UnknownKeyword, msg));
                    }
                },
                _ => {
                    return Err(self.err(
                        ParseErrorKind::Syntax,
                        format!("expected a clause or `}}`, found {}", self.found()),
                    ))
                }
            }
        }

        let close = self.toks[self.pos - 1].1;
        let missing = |name: &str| {
            ParseError::new(close, ParseErrorKind::Syntax, format!("missing required `{name}` clause"))
        };
        let (start_s, end_s) = time.ok_or_else(|| missing("time"))?;
        let schedule_day = day.ok_or_else(|| missing("schedule"))?;
        let output_sampling_period = period.ok_or_else(|| missing("output_sampling_period"))?;
        Ok(SimulationConfig {
            id,
            start_s,
            end_s,
            schedule_day,
            output_sampling_period,
            assignments: assignments.unwrap_or_default(),
            demand_scale,
            departure,
            span,
        })
    }

    fn assignments(&mut self) -> Result<Vec<Assignment>, ParseError> {
        self.expect(Tok::LBrace)?;
        let mut out = Vec::new();
        loop {
            let span = self.span();
            match self.peek() {
                Some(Tok::RBrace) => {
                    self.next();
                    return Ok(out);
                }
                Some(Tok::Word(w)) if w == "block" || w == "trip" => {
                    let is_block = w == "block";
                    self.next();
                    let id = self.ident(if is_block { "block id" } else { "trip id" })?;
                    self.expect(Tok::Colon)?;
                    let (vehicle_type_id, _) = self.string("quoted vehicle type")?;
                    out.push(Assignment {
                        target: if is_block {
                            AssignmentTarget::Block(id)
                        } else {
                            AssignmentTarget::Trip(id)
                        },
                        vehicle_type_id,
                        span,
                    });
                }
                Some(Tok::Word(w)) => {
                    let msg = format!("unknown keyword `{w}` in vehicleassignment (expected `block` or `trip`)");
                    return Err(self.err(ParseErrorKind::UnknownKeyword, msg));
                }
                _ => {
                    return Err(self.err(
                        ParseErrorKind::Syntax,
                        format!("expected an assignment or `}}`, found {}", self.found()),
                    ))
                }
            }
        }
    }
}

/// Parses a complete scenario document.
pub fn parse_scenario(source: &str) -> Result<ScenarioProgram, ParseError> {
    let toks = tokenize(source)?;
    let lines = source.lines().count().max(1);
    let last_len = source.lines().last().map_or(0, |l| l.chars().count());
    let mut p = Parser {
        toks,
        pos: 0,
        eof: Span {
            line: lines,
            col: last_len + 1,
        },
    };
    p.program()
}
