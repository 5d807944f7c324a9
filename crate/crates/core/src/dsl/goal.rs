use std::collections::HashMap;
use std::path::Path;

use super::lexer::TokenKind;
use super::parser::{Ids, PResult, Parser};
use super::value::{parse_bapo, parse_layer};
use super::ParseResult;
use crate::diag::{codes, Diagnostic, Loc, SourceSpan};
use crate::label::Label;
use crate::model::{
    AssociationKind, AssociationLink, Contribution, DepEnd, Dependency, Dependum, ElementKind, GActor, GElement,
    GoalModel, Refinement, RefinementKind, Strength,
};

/// Keywords that may follow the head reference of an actor-body statement.
const LINK_WORDS: &[&str] = &["and", "or", "makes", "helps", "hurts", "breaks"];

struct PendingRefine {
    actor: usize,
    parent: (String, SourceSpan),
    kind: RefinementKind,
    children: Vec<(String, SourceSpan)>,
}

struct PendingContrib {
    actor: usize,
    source: (String, SourceSpan),
    strength: Strength,
    target: (String, SourceSpan),
    span: SourceSpan,
}

#[derive(Default)]
struct State {
    model: GoalModel,
    ids: Ids,
    refines: Vec<PendingRefine>,
    contribs: Vec<PendingContrib>,
    /// Explicit dependency ids, resolved after defaults are assigned.
    dep_ids: Vec<Option<(String, SourceSpan)>>,
}

pub(super) fn parse(file: &Path, text: &str) -> ParseResult<GoalModel> {
    let mut p = Parser::new(file, text);
    let mut st = State::default();
    if header(&mut p, &mut st).is_ok() {
        p.finish();
    }
    resolve(&mut p, &mut st);
    ParseResult::from_parts(st.model, p.diags)
}

fn header(p: &mut Parser, st: &mut State) -> PResult<()> {
    p.expect_kw("goalmodel")?;
    st.model.name = p.name("model name")?.0;
    st.model.draft = p.eat_kw("draft");
    p.block(|p| statement(p, st))?;
    Ok(())
}

fn statement(p: &mut Parser, st: &mut State) -> PResult<()> {
    if p.is_kw("actor") {
        actor(p, st)
    } else if p.is_kw("depend") {
        depend(p, st)
    } else if p.is_kw("link") {
        link(p, st)
    } else {
        Err(p.unexpected("`actor`, `depend` or `link`"))
    }
}

fn actor(p: &mut Parser, st: &mut State) -> PResult<()> {
    let start = p.expect_kw("actor")?;
    let (id, id_span) = p.name("actor identifier")?;
    let name = p.display_name(&[]).unwrap_or_else(|| id.clone());
    let mut actor = GActor::new(id.clone(), name);
    actor.open = !p.eat_kw("closed");
    let mut end = id_span.clone();

    let index = st.model.actors.len();
    if p.is(&TokenKind::LBrace) {
        let open = actor.open;
        end = p.block(|p| actor_statement(p, st, &mut actor, index, open))?;
    }
    actor.loc = Loc(Some(start.to(&end)));
    st.ids.declare(&id, &id_span, &mut p.diags);
    st.model.actors.push(actor);
    Ok(())
}

fn actor_statement(p: &mut Parser, st: &mut State, actor: &mut GActor, index: usize, open: bool) -> PResult<()> {
    if let TokenKind::Ident(word) = &p.peek().kind {
        if let Some(kind) = ElementKind::from_keyword(word) {
            let start = p.bump().span;
            let (id, id_span) = p.name("element identifier")?;
            let name = p.display_name(LINK_WORDS).unwrap_or_else(|| id.clone());
            if !open {
                p.report(
                    Diagnostic::error(
                        codes::E_CLOSED,
                        format!("closed actor `{}` cannot contain element `{id}`", actor.id),
                    )
                    .with_span(Some(start.to(&id_span))),
                );
                return Ok(());
            }
            let mut el = GElement::new(id.clone(), kind, name);
            el.loc = Loc(Some(start.to(&id_span)));
            st.ids.declare(&id, &id_span, &mut p.diags);
            actor.elements.push(el);
            return Ok(());
        }
        if word == "layer" {
            let (focus, layer) = parse_layer(p)?;
            actor.layer_assignments.insert(focus, layer);
            return Ok(());
        }
        if word == "bapo" {
            actor.bapo_tags.extend(parse_bapo(p)?);
            return Ok(());
        }
    }

    let head = p.name("element keyword or element reference")?;
    let (word, word_span) = p.word("`and`, `or`, `makes`, `helps`, `hurts` or `breaks`")?;
    match word.as_str() {
        "and" | "or" => {
            let kind = if word == "and" { RefinementKind::And } else { RefinementKind::Or };
            let children = p.list(|p| p.name("child reference"))?;
            st.refines.push(PendingRefine { actor: index, parent: head, kind, children });
            Ok(())
        }
        w => match Strength::from_keyword(w) {
            Some(strength) => {
                let target = p.name("quality reference")?;
                let span = head.1.to(&target.1);
                st.contribs.push(PendingContrib { actor: index, source: head, strength, target, span });
                Ok(())
            }
            None => Err(p.error_at(
                word_span,
                codes::E_SYNTAX,
                format!("expected `and`, `or`, `makes`, `helps`, `hurts` or `breaks`, found `{w}`"),
            )),
        },
    }
}

fn dep_end(p: &mut Parser) -> PResult<(DepEnd, SourceSpan)> {
    let (actor, span) = p.name("actor reference")?;
    if p.eat(&TokenKind::Dot) {
        let (el, end) = p.name("element reference")?;
        Ok((DepEnd::element(actor, el), span.to(&end)))
    } else {
        Ok((DepEnd::actor(actor), span))
    }
}

fn depend(p: &mut Parser, st: &mut State) -> PResult<()> {
    let start = p.expect_kw("depend")?;
    let (depender, _) = dep_end(p)?;
    p.expect(TokenKind::Arrow)?;
    let (dependee, _) = dep_end(p)?;
    p.expect(TokenKind::Colon)?;
    let (kind_word, kind_span) = p.word("dependum kind")?;
    let kind = ElementKind::from_keyword(&kind_word).ok_or_else(|| {
        p.error_at(
            kind_span,
            codes::E_SYNTAX,
            format!("expected `goal`, `quality`, `task` or `resource`, found `{kind_word}`"),
        )
    })?;
    let (name, mut end) = p.name("dependum name")?;
    let mut initial = None;
    if p.eat_kw("label") {
        let (word, span) = p.word("label")?;
        initial = Some(parse_label(p, &word, &span)?);
        end = span;
    }
    let mut explicit = None;
    if p.eat_kw("as") {
        let (id, span) = p.name("dependency identifier")?;
        end = span.clone();
        explicit = Some((id, span));
    }
    st.model.dependencies.push(Dependency {
        id: String::new(),
        depender,
        dependum: Dependum { kind, name, initial },
        dependee,
        loc: Loc(Some(start.to(&end))),
    });
    st.dep_ids.push(explicit);
    Ok(())
}

pub(super) fn parse_label(p: &mut Parser, word: &str, span: &SourceSpan) -> PResult<Label> {
    match word.parse::<Label>() {
        Ok(l) => Ok(l),
        Err(_) if word == "conflict" => {
            Err(p.error_at(span.clone(), codes::E_VALUE, "`conflict` is computed, it cannot be assigned"))
        }
        Err(_) => Err(p.error_at(
            span.clone(),
            codes::E_SYNTAX,
            format!("expected satisfied, partsat, unknown, partden or denied, found `{word}`"),
        )),
    }
}

fn link(p: &mut Parser, st: &mut State) -> PResult<()> {
    let start = p.expect_kw("link")?;
    let (from, _) = p.name("actor reference")?;
    p.expect_kw("partof")?;
    let (to, end) = p.name("actor reference")?;
    st.model.associations.push(AssociationLink {
        kind: AssociationKind::PartOf,
        from,
        to,
        loc: Loc(Some(start.to(&end))),
    });
    Ok(())
}

fn resolve(p: &mut Parser, st: &mut State) {
    let model = &mut st.model;

    // Dependency identifiers: explicit ones first, then `dep<N>` defaults.
    for (i, explicit) in st.dep_ids.iter().enumerate() {
        if let Some((id, span)) = explicit {
            st.ids.declare(id, span, &mut p.diags);
            model.dependencies[i].id = id.clone();
        }
    }
    for (i, explicit) in st.dep_ids.iter().enumerate() {
        if explicit.is_none() {
            let id = format!("dep{}", i + 1);
            let span = model.dependencies[i].loc.0.clone().unwrap_or_else(|| p.span());
            st.ids.declare(&id, &span, &mut p.diags);
            model.dependencies[i].id = id;
        }
    }

    let owner: HashMap<String, (usize, ElementKind)> = model
        .actors
        .iter()
        .enumerate()
        .flat_map(|(ai, a)| a.elements.iter().map(move |e| (e.id.clone(), (ai, e.kind))))
        .collect();
    let actor_index: HashMap<String, usize> = model.actors.iter().enumerate().map(|(i, a)| (a.id.clone(), i)).collect();

    let err = |code: &str, msg: String, span: &SourceSpan| Diagnostic::error(code, msg).with_span(Some(span.clone()));

    for r in st.refines.drain(..) {
        let actor_id = model.actors[r.actor].id.clone();
        let (parent, pspan) = &r.parent;
        match owner.get(parent) {
            None => {
                p.report(err(codes::E_REF, format!("unknown element `{parent}`"), pspan));
                continue;
            }
            Some(&(ai, _)) if ai != r.actor => {
                p.report(err(codes::E_REFINE, format!("`{parent}` is not an element of actor `{actor_id}`"), pspan));
                continue;
            }
            Some(&(_, ElementKind::Quality)) => {
                p.report(err(
                    codes::E_QREFINE,
                    format!("quality `{parent}` cannot be AND/OR refined; use contributions"),
                    pspan,
                ));
                continue;
            }
            _ => {}
        }
        let mut children = Vec::new();
        for (child, cspan) in &r.children {
            match owner.get(child) {
                None => p.report(err(codes::E_REF, format!("unknown element `{child}`"), cspan)),
                Some(&(ai, _)) if ai != r.actor => p.report(err(
                    codes::E_REFINE,
                    format!("refinement child `{child}` is not inside actor `{actor_id}`"),
                    cspan,
                )),
                _ => children.push(child.clone()),
            }
        }
        let el = model.actors[r.actor]
            .elements
            .iter_mut()
            .find(|e| &e.id == parent)
            .expect("owner map is built from these elements");
        match &mut el.refinement {
            None => el.refinement = Some(Refinement { kind: r.kind, children }),
            Some(existing) if existing.kind == r.kind => {
                for c in children {
                    if !existing.children.contains(&c) {
                        existing.children.push(c);
                    }
                }
            }
            Some(existing) => p.report(err(
                codes::E_MIXED,
                format!(
                    "`{parent}` is already {}-refined; an element has one refinement kind",
                    existing.kind.keyword().to_uppercase()
                ),
                pspan,
            )),
        }
    }

    for c in st.contribs.drain(..) {
        let actor_id = model.actors[c.actor].id.clone();
        let (source, sspan) = &c.source;
        let (target, tspan) = &c.target;
        match owner.get(source) {
            None => {
                p.report(err(codes::E_REF, format!("unknown element `{source}`"), sspan));
                continue;
            }
            Some(&(ai, _)) if ai != c.actor => {
                p.report(err(codes::E_REF, format!("`{source}` is not an element of actor `{actor_id}`"), sspan));
                continue;
            }
            _ => {}
        }
        match owner.get(target) {
            None => {
                p.report(err(codes::E_REF, format!("unknown element `{target}`"), tspan));
                continue;
            }
            Some(&(_, kind)) if kind != ElementKind::Quality => {
                p.report(err(
                    codes::E_CONTRIB,
                    format!("contribution target `{target}` is a {kind}; only qualities receive contributions"),
                    tspan,
                ));
                continue;
            }
            _ => {}
        }
        let el = model.actors[c.actor]
            .elements
            .iter_mut()
            .find(|e| &e.id == source)
            .expect("owner map is built from these elements");
        el.contributions.push(Contribution { target: target.clone(), strength: c.strength, loc: Loc(Some(c.span)) });
    }

    for dep in &model.dependencies {
        let span = dep.loc.0.clone().unwrap_or_else(|| p.span());
        for end in [&dep.depender, &dep.dependee] {
            match actor_index.get(&end.actor) {
                None => p.report(err(codes::E_REF, format!("unknown actor `{}`", end.actor), &span)),
                Some(&ai) => {
                    if let Some(el) = &end.element {
                        if model.actors[ai].element(el).is_none() {
                            p.report(err(codes::E_REF, format!("actor `{}` has no element `{el}`", end.actor), &span));
                        }
                    }
                }
            }
        }
        if dep.depender == dep.dependee {
            p.report(err(
                codes::E_SELFDEP,
                format!("dependency `{}` connects `{}` to itself", dep.id, dep.depender),
                &span,
            ));
        }
    }

    for assoc in &model.associations {
        let span = assoc.loc.0.clone().unwrap_or_else(|| p.span());
        for a in [&assoc.from, &assoc.to] {
            if !actor_index.contains_key(a) {
                p.report(err(codes::E_REF, format!("unknown actor `{a}`"), &span));
            }
        }
    }
}
