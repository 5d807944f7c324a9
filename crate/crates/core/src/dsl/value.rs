use std::collections::{BTreeSet, HashMap};
use std::path::Path;

use super::lexer::TokenKind;
use super::parser::{Ids, PResult, Parser};
use super::ParseResult;
use crate::diag::{codes, Diagnostic, Loc, SourceSpan};
use crate::model::{
    Activity, BapoTag, ElementKind, Endpoint, FlowStatus, Layer, Stimulus, VActor, ValueFlow, ValueModel, ValueObject,
};

/// `layer(<focus>) = domain|usage|api|asset`, with the `layer` keyword next.
pub(super) fn parse_layer(p: &mut Parser) -> PResult<(String, Layer)> {
    p.expect_kw("layer")?;
    p.expect(TokenKind::LParen)?;
    let (focus, _) = p.name("api focus identifier")?;
    p.expect(TokenKind::RParen)?;
    p.expect(TokenKind::Eq)?;
    let (word, span) = p.word("layer")?;
    match Layer::from_keyword(&word) {
        Some(l) => Ok((focus, l)),
        None => Err(p.error_at(span, codes::E_SYNTAX, format!("expected domain, usage, api or asset, found `{word}`"))),
    }
}

/// `bapo = B, A, P, O` with the `bapo` keyword next.
pub(super) fn parse_bapo(p: &mut Parser) -> PResult<BTreeSet<BapoTag>> {
    p.expect_kw("bapo")?;
    p.expect(TokenKind::Eq)?;
    let tags = p.list(|p| {
        let (word, span) = p.word("B, A, P or O")?;
        BapoTag::from_letter(&word)
            .ok_or_else(|| p.error_at(span, codes::E_SYNTAX, format!("expected B, A, P or O, found `{word}`")))
    })?;
    Ok(tags.into_iter().collect())
}

struct PendingEnd {
    endpoint: Endpoint,
    span: SourceSpan,
}

#[derive(Default)]
struct State {
    model: ValueModel,
    ids: Ids,
    parents: Vec<Option<(String, SourceSpan)>>,
    flow_ids: Vec<Option<(String, SourceSpan)>>,
    flow_ends: Vec<(PendingEnd, PendingEnd)>,
    stimulus_at: Vec<SourceSpan>,
}

pub(super) fn parse(file: &Path, text: &str) -> ParseResult<ValueModel> {
    let mut p = Parser::new(file, text);
    let mut st = State::default();
    if header(&mut p, &mut st).is_ok() {
        p.finish();
    }
    resolve(&mut p, &mut st);
    ParseResult::from_parts(st.model, p.diags)
}

fn header(p: &mut Parser, st: &mut State) -> PResult<()> {
    p.expect_kw("valuemodel")?;
    st.model.name = p.name("model name")?.0;
    p.block(|p| statement(p, st))?;
    Ok(())
}

fn statement(p: &mut Parser, st: &mut State) -> PResult<()> {
    if p.is_kw("actor") {
        actor(p, st)
    } else if p.is_kw("flow") {
        flow(p, st)
    } else if p.is_kw("stimulus") {
        stimulus(p, st)
    } else {
        Err(p.unexpected("`actor`, `flow` or `stimulus`"))
    }
}

fn actor(p: &mut Parser, st: &mut State) -> PResult<()> {
    let start = p.expect_kw("actor")?;
    let (id, id_span) = p.name("actor identifier")?;
    let name = p.display_name(&[]).unwrap_or_else(|| id.clone());
    let mut actor = VActor::new(id.clone(), name);
    let mut end = id_span.clone();
    let mut parent = None;
    if p.eat_kw("in") {
        let (pid, span) = p.name("parent actor")?;
        end = span.clone();
        parent = Some((pid, span));
    }
    loop {
        if p.is_kw("api") {
            end = p.bump().span;
            actor.api_role = true;
        } else if p.is_kw("segment") {
            end = p.bump().span;
            actor.market_segment = true;
        } else {
            break;
        }
    }
    let mut activities = Vec::new();
    if p.is(&TokenKind::LBrace) {
        end = p.block(|p| {
            if p.is_kw("activity") {
                let start = p.bump().span;
                let (aid, aspan) = p.name("activity identifier")?;
                let name = p.display_name(&[]).unwrap_or_else(|| aid.clone());
                activities.push((Activity { id: aid, name, loc: Loc(Some(start.to(&aspan))) }, aspan));
                Ok(())
            } else if p.is_kw("layer") {
                let (focus, layer) = parse_layer(p)?;
                actor.layer_assignments.insert(focus, layer);
                Ok(())
            } else if p.is_kw("bapo") {
                actor.bapo_tags.extend(parse_bapo(p)?);
                Ok(())
            } else {
                Err(p.unexpected("`activity`, `layer` or `bapo`"))
            }
        })?;
    }
    st.ids.declare(&id, &id_span, &mut p.diags);
    for (a, span) in activities {
        st.ids.declare(&a.id, &span, &mut p.diags);
        actor.activities.push(a);
    }
    actor.parent = parent.as_ref().map(|(p, _)| p.clone());
    actor.loc = Loc(Some(start.to(&end)));
    st.model.actors.push(actor);
    st.parents.push(parent);
    Ok(())
}

fn endpoint(p: &mut Parser) -> PResult<PendingEnd> {
    let (actor, span) = p.name("actor reference")?;
    if p.eat(&TokenKind::Dot) {
        let (act, end) = p.name("activity reference")?;
        Ok(PendingEnd { endpoint: Endpoint::activity(actor, act), span: span.to(&end) })
    } else {
        Ok(PendingEnd { endpoint: Endpoint::actor(actor), span })
    }
}

fn flow(p: &mut Parser, st: &mut State) -> PResult<()> {
    let start = p.expect_kw("flow")?;
    let (object, _) = p.name("value object name")?;
    p.expect_kw("from")?;
    let from = endpoint(p)?;
    p.expect_kw("to")?;
    let to = endpoint(p)?;
    let mut end = to.span.clone();
    let mut kind = ElementKind::Resource;
    if p.eat(&TokenKind::Colon) {
        let (word, span) = p.word("value object kind")?;
        kind = ElementKind::from_keyword(&word).ok_or_else(|| {
            p.error_at(
                span.clone(),
                codes::E_SYNTAX,
                format!("expected resource, task, goal or quality, found `{word}`"),
            )
        })?;
        end = span;
    }
    let mut status = FlowStatus::Normal;
    if p.eat_kw("status") {
        let (word, span) = p.word("flow status")?;
        status = match word.as_str() {
            "problematic" => FlowStatus::Problematic,
            "missing" => FlowStatus::Missing,
            "normal" => FlowStatus::Normal,
            _ => {
                return Err(p.error_at(
                    span,
                    codes::E_SYNTAX,
                    format!("expected problematic or missing, found `{word}`"),
                ))
            }
        };
        end = span;
    }
    let mut group = None;
    if p.eat_kw("group") {
        let (g, span) = p.name("interface group")?;
        group = Some(g);
        end = span;
    }
    let mut explicit = None;
    if p.eat_kw("as") {
        let (id, span) = p.name("flow identifier")?;
        end = span.clone();
        explicit = Some((id, span));
    }
    st.model.flows.push(ValueFlow {
        id: String::new(),
        from: from.endpoint.clone(),
        to: to.endpoint.clone(),
        object: ValueObject { name: object, kind },
        status,
        group,
        loc: Loc(Some(start.to(&end))),
    });
    st.flow_ids.push(explicit);
    st.flow_ends.push((from, to));
    Ok(())
}

fn stimulus(p: &mut Parser, st: &mut State) -> PResult<()> {
    let start = p.expect_kw("stimulus")?;
    let (id, id_span) = p.name("stimulus identifier")?;
    let name = p.display_name(&[]).unwrap_or_else(|| id.clone());
    p.expect_kw("at")?;
    let (at, at_span) = p.name("owning actor")?;
    st.ids.declare(&id, &id_span, &mut p.diags);
    st.model.stimuli.push(Stimulus { id, name, at, loc: Loc(Some(start.to(&at_span))) });
    st.stimulus_at.push(at_span);
    Ok(())
}

fn resolve(p: &mut Parser, st: &mut State) {
    let model = &mut st.model;

    for (i, explicit) in st.flow_ids.iter().enumerate() {
        if let Some((id, span)) = explicit {
            st.ids.declare(id, span, &mut p.diags);
            model.flows[i].id = id.clone();
        }
    }
    for (i, explicit) in st.flow_ids.iter().enumerate() {
        if explicit.is_none() {
            let id = format!("flow{}", i + 1);
            let span = model.flows[i].loc.0.clone().unwrap_or_else(|| p.span());
            st.ids.declare(&id, &span, &mut p.diags);
            model.flows[i].id = id;
        }
    }

    let actors: HashMap<&str, usize> = model.actors.iter().enumerate().map(|(i, a)| (a.id.as_str(), i)).collect();
    let err = |msg: String, span: &SourceSpan| Diagnostic::error(codes::E_REF, msg).with_span(Some(span.clone()));

    for (from, to) in &st.flow_ends {
        for end in [from, to] {
            match actors.get(end.endpoint.actor.as_str()) {
                None => p.report(err(format!("unknown actor `{}`", end.endpoint.actor), &end.span)),
                Some(&ai) => {
                    if let Some(act) = &end.endpoint.activity {
                        if !model.actors[ai].activities.iter().any(|a| &a.id == act) {
                            p.report(err(format!("actor `{}` has no activity `{act}`", end.endpoint.actor), &end.span));
                        }
                    }
                }
            }
        }
    }

    for (f, (from, _)) in model.flows.iter().zip(&st.flow_ends) {
        if f.from == f.to {
            let span = f.loc.0.clone().unwrap_or_else(|| from.span.clone());
            p.report(
                Diagnostic::error(codes::E_SELFDEP, format!("flow `{}` starts and ends at `{}`", f.id, f.from))
                    .with_span(Some(span)),
            );
        }
    }

    for (s, span) in model.stimuli.iter().zip(&st.stimulus_at) {
        if !actors.contains_key(s.at.as_str()) {
            p.report(err(format!("unknown actor `{}`", s.at), span));
        }
    }

    let mut parent_ok = true;
    for parent in st.parents.iter().flatten() {
        if !actors.contains_key(parent.0.as_str()) {
            p.report(err(format!("unknown parent actor `{}`", parent.0), &parent.1));
            parent_ok = false;
        }
    }
    if parent_ok {
        // Walk each parent chain; a chain longer than the actor count loops.
        let mut reported = BTreeSet::new();
        for (i, a) in model.actors.iter().enumerate() {
            let mut cur = i;
            let mut steps = 0;
            while let Some(pid) = &model.actors[cur].parent {
                cur = actors[pid.as_str()];
                steps += 1;
                if cur == i || steps > model.actors.len() {
                    break;
                }
            }
            if cur == i && steps > 0 && reported.insert(i) {
                let span = st.parents[i].as_ref().map(|(_, s)| s.clone());
                p.report(
                    Diagnostic::error(codes::E_PARENT_CYCLE, format!("actor `{}` is nested inside itself", a.id))
                        .with_span(span),
                );
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::parse_value_model;
    use super::*;

    const TWO: &str = r#"valuemodel eco {
        actor dev "App Dev" {
            activity build "Build App"
        }
        actor prov "Provider" api
        flow "API access" from prov to dev.build
        flow fee from dev to prov : resource
        stimulus need "Need app" at dev
    }"#;

    #[test]
    fn two_actors_two_flows_one_stimulus() {
        let m = parse_value_model(TWO).unwrap();
        assert_eq!((m.actors.len(), m.flows.len(), m.stimuli.len()), (2, 2, 1));
        assert_eq!(m.flows[0].to, Endpoint::activity("dev", "build"));
        assert_eq!(m.flows[0].object.kind, ElementKind::Resource);
        assert_eq!(m.flows[1].id, "flow2");
        assert!(m.actor("prov").unwrap().api_role);
    }

    #[test]
    fn status_and_nesting() {
        let src = r#"valuemodel m {
            actor "Company"
            actor team "Team" in "Company" segment
            flow x from team to "Company" status problematic group g1
            flow y from "Company" to team : task status missing as y1
        }"#;
        let m = parse_value_model(src).unwrap();
        assert_eq!(m.actors[1].parent.as_deref(), Some("Company"));
        assert!(m.actors[1].market_segment);
        assert_eq!(m.flows[0].status, FlowStatus::Problematic);
        assert_eq!(m.flows[0].group.as_deref(), Some("g1"));
        assert_eq!(m.flows[1].status, FlowStatus::Missing);
        assert_eq!(m.flows[1].object.kind, ElementKind::Task);
        assert_eq!(m.flows[1].id, "y1");
    }

    #[test]
    fn annotations() {
        let src = "valuemodel m { actor a { layer(dev) = usage; bapo = B, P } }";
        let m = parse_value_model(src).unwrap();
        let a = &m.actors[0];
        assert_eq!(a.layer_assignments["dev"], Layer::Usage);
        assert_eq!(a.bapo_tags.iter().copied().collect::<Vec<_>>(), [BapoTag::Business, BapoTag::Process]);
    }

    fn codes_of(src: &str) -> Vec<String> {
        parse_value_model(src).diagnostics.into_iter().map(|d| d.code).collect()
    }

    #[test]
    fn reference_and_duplicate_errors() {
        assert_eq!(codes_of("valuemodel m { actor a\n flow x from a to b }"), ["E-REF"]);
        assert_eq!(codes_of("valuemodel m { actor a\n flow x from a.z to a }"), ["E-REF"]);
        assert_eq!(codes_of("valuemodel m { actor a\n actor a }"), ["E-DUP"]);
        assert_eq!(codes_of("valuemodel m { stimulus s at nobody }"), ["E-REF"]);
        assert_eq!(codes_of("valuemodel m { actor a\n flow x from a to a }"), ["E-SELFDEP"]);
        assert_eq!(codes_of("valuemodel m { actor a in b\n actor b in a }"), ["E-PARENT-CYCLE", "E-PARENT-CYCLE"]);
    }

    #[test]
    fn default_flow_id_clash_is_a_duplicate() {
        assert_eq!(
            codes_of("valuemodel m { actor a\n actor b\n flow x from a to b\n flow y from b to a as flow1 }"),
            ["E-DUP"]
        );
    }

    #[test]
    fn empty_model() {
        let m = parse_value_model("valuemodel empty {}").unwrap();
        assert_eq!(m, ValueModel::new("empty"));
    }
}
