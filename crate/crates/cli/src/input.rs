use std::io::Read;

use lft_core::symbol::SummandDoc;
use lft_core::transform::check_hypotheses;
use lft_core::TransformKind;
use lft_core::{Field, FieldCtx, FieldDescriptor, FieldElem, LocalSheaf, Point, Summand, TameChar, WildPart};
use serde::Deserialize;

use crate::error::CliError;
use crate::FieldArgs;

/// A symbol document whose field is optional; without one, coefficients are prime-field integers.
#[derive(Deserialize, Debug)]
#[serde(deny_unknown_fields)]
pub struct SymbolInput {
    #[serde(default)]
    field: Option<FieldDescriptor>,
    point: Point,
    summands: Vec<SummandDoc>,
}

impl SymbolInput {
    /// The field named by the document when its coordinates only make sense there.
    pub fn fixed_field(&self, args: FieldArgs) -> Result<Option<Field>, CliError> {
        let Some(d) = &self.field else { return Ok(None) };
        if d.p != args.p {
            return Err(CliError::Usage(format!(
                "document is over p = {} but --p is {}",
                d.p, args.p
            )));
        }
        if d.k == 1 && args.k.is_none_or(|k| k == 1) {
            return Ok(None);
        }
        if args.k.is_some_and(|k| k != d.k) {
            return Err(CliError::Usage(format!(
                "document has k = {} but --k is {}",
                d.k,
                args.k.unwrap_or(0)
            )));
        }
        Ok(Some(FieldCtx::from_descriptor(d)?))
    }

    /// Checks the transform hypotheses on the raw depths, before any reduction.
    pub fn check(&self, p: u64, kind: TransformKind) -> Result<(), CliError> {
        for x in &self.summands {
            let s = x.alpha.iter().map(|t| t.0.unsigned_abs()).max().unwrap_or(0);
            if s > 0 {
                check_hypotheses(p, x.r, s, kind)?;
            }
        }
        Ok(())
    }

    pub fn build(&self, field: &FieldCtx) -> Result<LocalSheaf, CliError> {
        let summands = self
            .summands
            .iter()
            .map(|s| {
                let wild = wild_part(field, &s.alpha)?;
                Ok(Summand::new(field, s.r, wild, s.chi, s.unip)?)
            })
            .collect::<Result<Vec<_>, CliError>>()?;
        Ok(LocalSheaf::new(self.point, summands))
    }
}

pub fn read_source(arg: &str) -> Result<String, CliError> {
    let trimmed = arg.trim_start();
    if trimmed.starts_with('{') || trimmed.starts_with('[') {
        return Ok(arg.to_string());
    }
    if arg == "-" {
        let mut text = String::new();
        std::io::stdin()
            .read_to_string(&mut text)
            .map_err(|e| CliError::Input(format!("stdin: {e}")))?;
        return Ok(text);
    }
    std::fs::read_to_string(arg).map_err(|e| CliError::Input(format!("{arg}: {e}")))
}

pub fn symbol(text: &str) -> Result<SymbolInput, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Input(format!("symbol document: {e}")))
}

/// Coordinates in the power basis; a single coordinate is read as an integer mod p.
pub fn coords_to_elem(field: &FieldCtx, coords: &[i64]) -> Result<FieldElem, CliError> {
    match coords {
        [c] => Ok(field.from_int(*c)),
        _ => {
            let p = field.p() as i64;
            let reduced: Vec<u64> = coords.iter().map(|c| c.rem_euclid(p) as u64).collect();
            Ok(field.elem(&reduced)?)
        }
    }
}

pub fn wild_part<C: AsCoords>(field: &FieldCtx, terms: &[(i64, C)]) -> Result<WildPart, CliError> {
    let parsed = terms
        .iter()
        .map(|(e, c)| Ok((*e, coords_to_elem(field, &c.as_coords())?)))
        .filter(|t: &Result<(i64, FieldElem), CliError>| t.as_ref().map_or(true, |t| !t.1.is_zero()))
        .collect::<Result<Vec<_>, CliError>>()?;
    Ok(WildPart::new(field, parsed)?)
}

pub trait AsCoords {
    fn as_coords(&self) -> Vec<i64>;
}

impl AsCoords for Vec<u64> {
    fn as_coords(&self) -> Vec<i64> {
        self.iter().map(|&c| c as i64).collect()
    }
}

impl AsCoords for Vec<i64> {
    fn as_coords(&self) -> Vec<i64> {
        self.clone()
    }
}

/// `EXP:COEFF,...` with integer coefficients, or a JSON list of `[exp, [coords]]`.
pub fn polar_terms(text: &str) -> Result<Vec<(i64, Vec<i64>)>, CliError> {
    let text = text.trim();
    if text.starts_with('[') {
        return serde_json::from_str(text).map_err(|e| CliError::Usage(format!("--alpha: {e}")));
    }
    text.split(',')
        .filter(|part| !part.trim().is_empty())
        .map(|part| {
            let bad = || CliError::Usage(format!("--alpha: expected EXP:COEFF, got {part:?}"));
            let (e, c) = part.split_once(':').ok_or_else(bad)?;
            Ok((
                e.trim().parse().map_err(|_| bad())?,
                vec![c.trim().parse().map_err(|_| bad())?],
            ))
        })
        .collect()
}

pub fn chars(text: &str) -> Result<Vec<TameChar>, CliError> {
    text.split(',')
        .filter(|part| !part.trim().is_empty())
        .map(|part| {
            part.parse()
                .map_err(|e: lft_core::SymbolError| CliError::Usage(e.to_string()))
        })
        .collect()
}

pub fn element(field: &FieldCtx, text: &str) -> Result<FieldElem, CliError> {
    let coords = text
        .split(',')
        .map(|c| c.trim().parse::<i64>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| CliError::Usage(format!("--t: expected comma-separated integers, got {text:?}")))?;
    coords_to_elem(field, &coords)
}
