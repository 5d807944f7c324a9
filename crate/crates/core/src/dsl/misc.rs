//! Scenario, API descriptor and metric catalog dialects.

use std::collections::HashSet;
use std::path::Path;

use super::goal::parse_label;
use super::lexer::TokenKind;
use super::parser::{PResult, Parser};
use super::ParseResult;
use crate::diag::{codes, Diagnostic, Loc, SourceSpan};
use crate::evaluate::Scenario;
use crate::govern::{Automation, Dimension, MetricCatalog, MetricDef};
use crate::lifecycle::{ApiDescriptor, CharField, Stage, ValueCurveSample};

/// `scenario <name> { label <id> = <label> ... }`
pub(super) fn parse_scenario(file: &Path, text: &str) -> ParseResult<Scenario> {
    let mut p = Parser::new(file, text);
    let mut s = Scenario::default();
    let mut seen: HashSet<String> = HashSet::new();
    let head = (|| -> PResult<()> {
        p.expect_kw("scenario")?;
        s.name = p.name("scenario name")?.0;
        p.block(|p| {
            let start = p.expect_kw("label")?;
            let (id, id_span) = p.name("element identifier")?;
            p.expect(TokenKind::Eq)?;
            let (word, span) = p.word("label")?;
            let label = parse_label(p, &word, &span)?;
            if !seen.insert(id.clone()) {
                return Err(p.error_at(id_span, codes::E_DUP, format!("`{id}` is labelled twice")));
            }
            s.locs.insert(id.clone(), Loc(Some(start.to(&span))));
            s.assign(id, label);
            Ok(())
        })?;
        Ok(())
    })();
    if head.is_ok() {
        p.finish();
    }
    ParseResult::from_parts(s, p.diags)
}

/// Words accepted as rationale tags: bare words (reserved or not) and strings.
fn tag(p: &mut Parser) -> PResult<(String, SourceSpan)> {
    if let TokenKind::Str(s) = &p.peek().kind {
        let s = s.clone();
        return Ok((s, p.bump().span));
    }
    p.word("rationale tag")
}

/// ```text
/// api <name> {
///   stage plan|operation|deprecation|retire
///   stability <value>   (and change, commitment, governance, compatibility, support)
///   sample <t> <stage> <value>
///   rationale <tag>, <tag>
/// }
/// ```
pub(super) fn parse_api_descriptor(file: &Path, text: &str) -> ParseResult<ApiDescriptor> {
    let mut p = Parser::new(file, text);
    let mut d = ApiDescriptor::new("", Stage::Plan);
    let mut stage_seen = false;
    let mut head_span = None;
    let head = (|| -> PResult<()> {
        let start = p.expect_kw("api")?;
        d.name = p.name("api name")?.0;
        let end = p.block(|p| descriptor_statement(p, &mut d, &mut stage_seen))?;
        d.loc = Loc(Some(start.to(&end)));
        head_span = Some(start);
        Ok(())
    })();
    if head.is_ok() {
        p.finish();
        if !stage_seen {
            p.report(Diagnostic::error(codes::E_SYNTAX, "api descriptor declares no `stage`").at(&d.loc));
        }
    }
    ParseResult::from_parts(d, p.diags)
}

fn descriptor_statement(p: &mut Parser, d: &mut ApiDescriptor, stage_seen: &mut bool) -> PResult<()> {
    let (word, start) = p.word("`stage`, a characteristic, `sample` or `rationale`")?;
    if word == "stage" {
        let (kw, span) = p.word("stage")?;
        d.declared_stage = stage_kw(p, &kw, &span)?;
        if std::mem::replace(stage_seen, true) {
            return Err(p.error_at(start.to(&span), codes::E_DUP, "`stage` is declared twice"));
        }
        return Ok(());
    }
    if word == "sample" {
        let (t, _) = p.number("sample time")?;
        let (kw, span) = p.word("stage")?;
        let stage = stage_kw(p, &kw, &span)?;
        let (v, end) = p.number("sample value")?;
        let mut s = ValueCurveSample::new(t, stage, v);
        s.loc = Loc(Some(start.to(&end)));
        d.curve.push(s);
        return Ok(());
    }
    if word == "rationale" {
        let tags = p.list(tag)?;
        d.transition_rationales.extend(tags.into_iter().map(|(t, _)| t));
        return Ok(());
    }
    let Some(field) = CharField::from_keyword(&word) else {
        return Err(p.error_at(
            start,
            codes::E_SYNTAX,
            format!("expected `stage`, a characteristic, `sample` or `rationale`, found `{word}`"),
        ));
    };
    let (kw, span) = p.word("characteristic value")?;
    if d.field_locs.contains_key(&field) {
        return Err(p.error_at(start.to(&span), codes::E_DUP, format!("`{field}` is stated twice")));
    }
    if !d.observed.set(field, &kw) {
        return Err(p.error_at(
            span,
            codes::E_VALUE,
            format!("`{kw}` is not a {field} value; expected one of {}", field.keywords().join(", ")),
        ));
    }
    d.field_locs.insert(field, Loc(Some(start.to(&span))));
    Ok(())
}

fn stage_kw(p: &mut Parser, kw: &str, span: &SourceSpan) -> PResult<Stage> {
    Stage::from_keyword(kw).ok_or_else(|| {
        p.error_at(
            span.clone(),
            codes::E_SYNTAX,
            format!("expected plan, operation, deprecation or retire, found `{kw}`"),
        )
    })
}

fn string(p: &mut Parser, expected: &str) -> PResult<String> {
    match &p.peek().kind {
        TokenKind::Str(s) => {
            let s = s.clone();
            p.bump();
            Ok(s)
        }
        _ => Err(p.unexpected(expected)),
    }
}

/// ```text
/// metrics <name> {
///   metric <name> {
///     what "..."  why "..."  who "role", ...  where "source", ...
///     dims business, usage, design, implementation
///     automation automatable|partial|manual
///     links <element id>, ...
///   }
/// }
/// ```
pub(super) fn parse_metric_catalog(file: &Path, text: &str) -> ParseResult<MetricCatalog> {
    let mut p = Parser::new(file, text);
    let mut cat = MetricCatalog::default();
    let mut names: HashSet<String> = HashSet::new();
    let head = (|| -> PResult<()> {
        p.expect_kw("metrics")?;
        cat.name = p.name("catalog name")?.0;
        p.block(|p| {
            let start = p.expect_kw("metric")?;
            let (name, name_span) = p.name("metric name")?;
            let mut m = MetricDef::new(name.clone());
            let end = p.block(|p| metric_statement(p, &mut m))?;
            m.loc = Loc(Some(start.to(&end)));
            if !names.insert(name.clone()) {
                p.report(
                    Diagnostic::error(codes::E_DUP, format!("duplicate metric `{name}`")).with_span(Some(name_span)),
                );
            }
            cat.metrics.push(m);
            Ok(())
        })?;
        Ok(())
    })();
    if head.is_ok() {
        p.finish();
    }
    ParseResult::from_parts(cat, p.diags)
}

fn metric_statement(p: &mut Parser, m: &mut MetricDef) -> PResult<()> {
    let (word, span) = p.word("`what`, `why`, `who`, `where`, `dims`, `automation` or `links`")?;
    match word.as_str() {
        "what" => m.what = string(p, "description string")?,
        "why" => m.why = string(p, "goal text")?,
        "who" => m.who.extend(p.list(|p| string(p, "role string"))?),
        "where" => m.sources.extend(p.list(|p| string(p, "data source string"))?),
        "dims" => {
            let dims = p.list(|p| {
                let (w, s) = p.word("dimension")?;
                Dimension::from_keyword(&w).ok_or_else(|| {
                    p.error_at(
                        s,
                        codes::E_SYNTAX,
                        format!("expected business, usage, design or implementation, found `{w}`"),
                    )
                })
            })?;
            m.dimensions.extend(dims);
        }
        "automation" => {
            let (w, s) = p.word("automation level")?;
            m.automation = Some(Automation::from_keyword(&w).ok_or_else(|| {
                p.error_at(s, codes::E_SYNTAX, format!("expected automatable, partial or manual, found `{w}`"))
            })?);
        }
        "links" => m.links.extend(p.list(|p| p.name("element identifier"))?.into_iter().map(|(n, _)| n)),
        other => {
            return Err(p.error_at(
                span,
                codes::E_SYNTAX,
                format!("expected `what`, `why`, `who`, `where`, `dims`, `automation` or `links`, found `{other}`"),
            ))
        }
    }
    Ok(())
}
