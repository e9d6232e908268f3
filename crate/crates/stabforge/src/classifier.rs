//! Conjugacy classes of maximal finite subgroups of S_n and G_n(u).
//!
//! S_n is the group of units of the maximal order of the central division
//! algebra D_n of invariant 1/n over Q_p, and G_n(u) = D_n^× / ⟨pu⟩. The
//! engines below turn the extension criteria for maximal abelian subgroups
//! F_0 = C_{p^α} × C_{p^{n_α}−1} into total decision procedures. Classes whose
//! isomorphism type is not determined by the general criteria are reported as
//! extensions `K.[q]` of a known kernel by a group of known order.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{divisors, gcd, is_prime, phi_prime_power, pow_mod, upow, vp};
use crate::groups::{Containment, GroupKind};
use crate::padic::PadicUnit;
use crate::unit_classes::{epsilon_test, r1_max, r2_admissible, StabilizerParams};
use crate::{Error, Result};

/// Largest prime accepted by [`maximal_in_gn`] and [`scan`].
pub const GRID_MAX_P: u32 = 7;
/// Largest height accepted by [`maximal_in_gn`] and [`scan`].
pub const GRID_MAX_N: u32 = 12;

/// One conjugacy class in a report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupClassLabel {
    pub label: String,
    pub order: u64,
    /// Rule that produced the class.
    pub provenance: String,
    /// Number of conjugacy classes sharing this description.
    pub count: u32,
    pub structure: GroupKind,
}

impl GroupClassLabel {
    pub fn new(structure: GroupKind, provenance: &str, count: u32) -> GroupClassLabel {
        GroupClassLabel {
            label: structure.to_string(),
            order: structure.order(),
            provenance: provenance.into(),
            count,
            structure,
        }
    }
}

/// A candidate class that is not maximal.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DroppedClass {
    pub label: String,
    pub order: u64,
    pub provenance: String,
    pub contained_in: String,
    pub rule: String,
    pub structure: GroupKind,
}

/// An abelian class C_{p^α} × C_d.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbelianClass {
    pub alpha: u32,
    pub d: u64,
    pub order: u64,
    pub label: String,
}

/// Agreement between an extension with r₁ = p − 1 and the ε power-class test.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConsistencyCheck {
    pub alpha: u32,
    pub d: u64,
    pub r1: u64,
    /// `None` when the field tower exceeds the configured size.
    pub epsilon_test: Option<bool>,
}

/// Parameters of a classification query as echoed in reports.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportInput {
    pub p: u32,
    pub n: u32,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub u_residue: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub modulus: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub unit: Option<i64>,
}

/// Result of a classification query.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub query: String,
    pub input: ReportInput,
    pub classes: Vec<GroupClassLabel>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub dropped: Vec<DroppedClass>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub abelian: Vec<AbelianClass>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub notes: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub consistency: Vec<ConsistencyCheck>,
}

impl ClassificationReport {
    fn new(query: &str, input: ReportInput) -> ClassificationReport {
        ClassificationReport {
            query: query.into(),
            input,
            classes: Vec::new(),
            dropped: Vec::new(),
            abelian: Vec::new(),
            notes: Vec::new(),
            consistency: Vec::new(),
        }
    }

    /// Class labels in report order.
    pub fn labels(&self) -> Vec<String> {
        self.classes.iter().map(|c| c.label.clone()).collect()
    }

    /// Pretty-printed JSON.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Pairs (a, b, verdict) of classes where a is not excluded from lying
    /// in b: an abstract embedding exists (`Yes`) or cannot be ruled out
    /// (`Unknown`). Empty for a report whose maximality is fully certified.
    pub fn possible_containments(&self) -> Vec<(String, String, Containment)> {
        let mut out = Vec::new();
        for (i, a) in self.classes.iter().enumerate() {
            for (j, b) in self.classes.iter().enumerate() {
                if i == j {
                    continue;
                }
                let v =
                    if self.query == "maximal_in_sn" { a.structure.embeds_in(&b.structure) } else { may_contain(a, b) };
                if v != Containment::No {
                    out.push((a.label.clone(), b.label.clone(), v));
                }
            }
        }
        out
    }
}

/// A classification query for G_n(u): u enters through u mod p² (p odd) or
/// u mod 8 (p = 2).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassificationInput {
    pub p: u32,
    pub n: u32,
    pub u_residue: u64,
    pub modulus: u64,
    /// Optional integer representative of the full unit u.
    pub unit: Option<i64>,
}

impl ClassificationInput {
    /// Input from any integer representative of the residue of u.
    pub fn new(p: u32, n: u32, u: i64) -> Result<ClassificationInput> {
        validate_pn(p, n)?;
        let modulus = residue_modulus(p);
        if u.rem_euclid(p as i64) == 0 {
            return Err(Error::InvalidInput(format!("u = {u} is not a unit at p = {p}")));
        }
        Ok(ClassificationInput { p, n, u_residue: u.rem_euclid(modulus as i64) as u64, modulus, unit: None })
    }

    /// Attaches a full integer unit, which must reduce to the residue datum.
    pub fn with_unit(mut self, u: i64) -> Result<ClassificationInput> {
        if u.rem_euclid(self.modulus as i64) as u64 != self.u_residue {
            return Err(Error::InvalidInput(format!(
                "u = {u} does not reduce to {} mod {}",
                self.u_residue, self.modulus
            )));
        }
        self.unit = Some(u);
        Ok(self)
    }

    /// Attaches a p-adic unit, which must reduce to the residue datum.
    pub fn with_padic_unit(self, u: &PadicUnit) -> Result<ClassificationInput> {
        if u.as_int().prime() != self.p {
            return Err(Error::InvalidInput("unit belongs to a different prime".into()));
        }
        let v: i64 = u
            .as_int()
            .signed_value()
            .try_into()
            .map_err(|_| Error::UnsupportedParameters("unit representative exceeds 64 bits".into()))?;
        self.with_unit(v)
    }

    fn report_input(&self) -> ReportInput {
        ReportInput {
            p: self.p,
            n: self.n,
            u_residue: Some(self.u_residue),
            modulus: Some(self.modulus),
            unit: self.unit,
        }
    }

    fn u_mod8(&self) -> u64 {
        self.u_residue % 8
    }

    fn u_is_pm1_mod8(&self) -> bool {
        matches!(self.u_mod8(), 1 | 7)
    }
}

fn residue_modulus(p: u32) -> u64 {
    if p == 2 {
        8
    } else {
        (p as u64) * (p as u64)
    }
}

fn validate_pn(p: u32, n: u32) -> Result<()> {
    if !is_prime(p as u64) {
        return Err(Error::InvalidInput(format!("{p} is not prime")));
    }
    if n == 0 {
        return Err(Error::InvalidInput("n must be positive".into()));
    }
    Ok(())
}

fn check_grid(p: u32, n: u32) -> Result<()> {
    if p > GRID_MAX_P || n > GRID_MAX_N {
        return Err(Error::UnsupportedParameters(format!(
            "(p, n) = ({p}, {n}) is outside the supported grid p <= {GRID_MAX_P}, n <= {GRID_MAX_N}"
        )));
    }
    Ok(())
}

/// Decomposition n = (p−1)p^{k−1}m (p odd) or n = 2^{k−1}m (p = 2);
/// k = 0 when p − 1 does not divide n.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct HeightShape {
    pub k: u32,
    pub m: u64,
}

pub fn height_shape(p: u32, n: u32) -> HeightShape {
    let (p, n) = (p as u64, n as u64);
    if n % (p - 1) != 0 {
        return HeightShape { k: 0, m: n };
    }
    let q = n / (p - 1);
    let k = vp(q, p) + 1;
    HeightShape { k, m: q / upow(p, k - 1) }
}

/// n_α = n/φ(p^α).
fn n_alpha(p: u32, n: u32, alpha: u32) -> u32 {
    n / phi_prime_power(p as u64, alpha) as u32
}

fn checked_order(x: u128) -> Result<u64> {
    u64::try_from(x).map_err(|_| Error::UnsupportedParameters("group order exceeds 64 bits".into()))
}

/// p^e − 1 as u64.
fn prime_power_minus_one(p: u32, e: u32) -> Result<u64> {
    let v =
        (p as u128).checked_pow(e).ok_or_else(|| Error::UnsupportedParameters("group order exceeds 64 bits".into()))?;
    checked_order(v - 1)
}

/// Generator of the order p − 1 subgroup of (Z/p^α)^×: the Teichmüller lift
/// of the least primitive root mod p.
fn teichmuller_generator(p: u64, alpha: u32) -> u64 {
    let g = (2..p.max(3)).find(|&g| crate::arith::mult_order(g, p) == p - 1).unwrap_or(1);
    pow_mod(g, upow(p, alpha - 1), upow(p, alpha))
}

/// Classes that lie in S_n.
fn inside_sn(provenance: &str) -> bool {
    provenance.starts_with("sn.") || provenance.ends_with("quaternionic_unextended")
}

/// Classes built around an element of positive valuation: ξ_{±u} of
/// valuation 1/n in the α = 1 classes, x_3 of valuation 1/2 in the
/// surviving α = 2 class.
fn leaves_sn(provenance: &str) -> bool {
    provenance.contains(".alpha1.") || (provenance.contains(".alpha2.full") && !provenance.ends_with("valuation_zero"))
}

/// Whether class `a` might be contained in class `b` up to conjugacy, after
/// the necessary conditions: an abstract embedding, and no class with an
/// element of positive valuation inside a class contained in S_n (conjugation
/// preserves the valuation).
fn may_contain(a: &GroupClassLabel, b: &GroupClassLabel) -> Containment {
    if leaves_sn(&a.provenance) && inside_sn(&b.provenance) {
        return Containment::No;
    }
    a.structure.embeds_in(&b.structure)
}

/// S_n: isomorphic finite subgroups are conjugate, so an abstract embedding is
/// a containment of classes and the smaller class is dropped.
fn dedup_sn(report: &mut ClassificationReport) {
    let n = report.classes.len();
    let mut dropped = vec![false; n];
    for i in 0..n {
        for j in 0..n {
            if i == j || dropped[j] {
                continue;
            }
            let (a, b) = (&report.classes[i], &report.classes[j]);
            if a.structure.embeds_in(&b.structure) == Containment::Yes {
                dropped[i] = true;
                report.dropped.push(DroppedClass {
                    label: a.label.clone(),
                    order: a.order,
                    provenance: a.provenance.clone(),
                    contained_in: b.label.clone(),
                    rule: "isomorphic_embedding".into(),
                    structure: a.structure.clone(),
                });
                break;
            }
        }
    }
    let mut keep = dropped.iter().map(|d| !d);
    report.classes.retain(|_| keep.next().unwrap());
}

/// G_n(u): isomorphic finite subgroups need not be conjugate, so classes are
/// only dropped by the explicit containment rules; possible containments that
/// survive the necessary conditions are noted.
fn note_possible_containments(report: &mut ClassificationReport) {
    for (a, b, verdict) in report.possible_containments() {
        let why = match verdict {
            Containment::Yes => "embeds abstractly, conjugacy not decided",
            _ => "not decided by the criteria",
        };
        report.notes.push(format!("containment of {a} in {b}: {why}; both are kept"));
    }
}

/// Maximal finite subgroup classes of S_n.
pub fn maximal_in_sn(p: u32, n: u32) -> Result<ClassificationReport> {
    validate_pn(p, n)?;
    let mut report =
        ClassificationReport::new("maximal_in_sn", ReportInput { p, n, u_residue: None, modulus: None, unit: None });
    let shape = height_shape(p, n);
    if p > 2 {
        report.classes.push(GroupClassLabel::new(GroupKind::cyclic(prime_power_minus_one(p, n)?), "sn.unramified", 1));
        for alpha in 1..=shape.k {
            let na = n_alpha(p, n, alpha);
            let quotient = checked_order(prime_power_minus_one(p, na)? as u128 * (p as u128 - 1))?;
            let kind = GroupKind::metacyclic(upow(p as u64, alpha), quotient, teichmuller_generator(p as u64, alpha));
            report.classes.push(GroupClassLabel::new(kind, "sn.ramified", 1));
        }
    } else {
        for alpha in 1..=shape.k {
            let na = n_alpha(p, n, alpha);
            let order = checked_order(upow(2, alpha) as u128 * prime_power_minus_one(2, na)? as u128)?;
            if shape.k == 2 && alpha == 2 {
                let kind = GroupKind::product(vec![
                    GroupKind::T24,
                    GroupKind::cyclic(prime_power_minus_one(2, shape.m as u32)?),
                ]);
                report.classes.push(GroupClassLabel::new(kind, "sn.p2.quaternionic", 1));
            } else {
                report.classes.push(GroupClassLabel::new(GroupKind::cyclic(order), "sn.p2.cyclic", 1));
            }
        }
    }
    dedup_sn(&mut report);
    if !report.dropped.is_empty() {
        report.notes.push(
            "the general list includes a class contained in another when m = 1; it is reported under dropped".into(),
        );
    }
    Ok(report)
}

/// Abelian finite subgroup classes C_{p^α} × C_d with 0 ≤ α ≤ k and
/// d | p^{n_α} − 1.
pub fn abelian_classes(p: u32, n: u32) -> Result<ClassificationReport> {
    validate_pn(p, n)?;
    let mut report =
        ClassificationReport::new("abelian_classes", ReportInput { p, n, u_residue: None, modulus: None, unit: None });
    let shape = height_shape(p, n);
    for alpha in 0..=shape.k {
        if !(n as u64).is_multiple_of(phi_prime_power(p as u64, alpha)) {
            continue;
        }
        let na = n_alpha(p, n, alpha);
        for d in divisors(prime_power_minus_one(p, na)?) {
            let order = checked_order(upow(p as u64, alpha) as u128 * d as u128)?;
            report.abelian.push(AbelianClass { alpha, d, order, label: GroupKind::cyclic(order).to_string() });
        }
    }
    Ok(report)
}

fn stabilizer(input: &ClassificationInput, alpha: u32, d: u64) -> StabilizerParams {
    StabilizerParams { p: input.p, n: input.n, alpha, d, u: input.unit.unwrap_or(input.u_residue as i64) }
}

/// (r₁, r₂) for the maximal F_0 at level α.
fn r_values(params: StabilizerParams) -> Result<(u64, u64)> {
    let r1 = r1_max(params)?.maximal;
    let r2 = r2_admissible(params, r1)?.maximal;
    Ok((r1, r2))
}

/// Maximal finite subgroup classes of G_n(u). At n = 2 and p ∈ {2, 3} the
/// explicit tables are returned; elsewhere the general engine.
pub fn maximal_in_gn(input: &ClassificationInput) -> Result<ClassificationReport> {
    if input.n == 2 && (input.p == 2 || input.p == 3) {
        n2_table(input)
    } else {
        maximal_in_gn_general(input)
    }
}

/// The general engine over all maximal abelian F_0.
pub fn maximal_in_gn_general(input: &ClassificationInput) -> Result<ClassificationReport> {
    validate_pn(input.p, input.n)?;
    check_grid(input.p, input.n)?;
    let mut report = ClassificationReport::new("maximal_in_gn", input.report_input());
    if input.p > 2 {
        general_odd(input, &mut report)?;
    } else {
        general_two(input, &mut report)?;
    }
    note_possible_containments(&mut report);
    Ok(report)
}

fn general_odd(input: &ClassificationInput, report: &mut ClassificationReport) -> Result<()> {
    let (p, n) = (input.p, input.n);
    let shape = height_shape(p, n);
    let kind = GroupKind::metacyclic(prime_power_minus_one(p, n)?, n as u64, p as u64);
    report.classes.push(GroupClassLabel::new(kind, "gn.frobenius", 1));
    let p64 = p as u64;
    let u = input.u_residue;
    let u_outside = pow_mod(u, p64 - 1, p64 * p64) != 1;
    for alpha in 1..=shape.k {
        let d = prime_power_minus_one(p, n_alpha(p, n, alpha))?;
        let params = stabilizer(input, alpha, d);
        let (r1, r2) = r_values(params)?;
        let f0 = GroupKind::cyclic(checked_order(upow(p64, alpha) as u128 * d as u128)?);
        let galois = params.field_degree();
        let (quotient, provenance) = if alpha <= 1 {
            (galois, "gn.full_extension.low_alpha")
        } else if alpha == shape.k && u_outside {
            (galois, "gn.full_extension.top_alpha")
        } else {
            ((p64 - 1) * shape.m, "gn.prime_to_p_extension")
        };
        let kind = GroupKind::extension(f0, checked_order(r1 as u128 * r2 as u128 * quotient as u128)?);
        report.classes.push(GroupClassLabel::new(kind, provenance, 1));
        if r1 == p64 - 1 {
            if let Some(unit) = input.unit {
                let params = StabilizerParams { u: unit, ..params };
                let verdict = match epsilon_test(params, r1) {
                    Ok(v) => Some(v),
                    Err(Error::UnsupportedParameters(_)) => None,
                    Err(e) => return Err(e),
                };
                report.consistency.push(ConsistencyCheck { alpha, d, r1, epsilon_test: verdict });
            }
        }
    }
    Ok(())
}

fn general_two(input: &ClassificationInput, report: &mut ClassificationReport) -> Result<()> {
    let n = input.n;
    let shape = height_shape(2, n);
    let d1 = prime_power_minus_one(2, n)?;
    let split = GroupKind::metacyclic(2 * d1, n as u64, (d1 + 2) % (2 * d1).max(1));
    report.classes.push(GroupClassLabel::new(split, "gn.p2.alpha1.split", 1));
    if n.is_multiple_of(2) {
        let nonsplit = GroupKind::metacyclic(d1, 2 * n as u64, 2);
        report.classes.push(GroupClassLabel::new(nonsplit, "gn.p2.alpha1.nonsplit", 1));
    }
    let quaternionic =
        GroupKind::product(vec![GroupKind::T24, GroupKind::cyclic(prime_power_minus_one(2, shape.m as u32)?)]);
    for alpha in 2..=shape.k {
        let d = prime_power_minus_one(2, n_alpha(2, n, alpha))?;
        let params = stabilizer(input, alpha, d);
        let (r1, r2) = r_values(params)?;
        let f0 = GroupKind::cyclic(checked_order(upow(2, alpha) as u128 * d as u128)?);
        if alpha == 2 && shape.k == 2 {
            let kind =
                GroupKind::extension(f0, checked_order(r1 as u128 * r2 as u128 * params.field_degree() as u128)?);
            let label = GroupClassLabel::new(kind, "gn.p2.alpha2.full", 1);
            let dropped = |rule: &str, container: &GroupKind| DroppedClass {
                label: label.label.clone(),
                order: label.order,
                provenance: label.provenance.clone(),
                contained_in: container.to_string(),
                rule: rule.into(),
                structure: label.structure.clone(),
            };
            if input.u_is_pm1_mod8() {
                let container = GroupKind::extension(quaternionic.clone(), n as u64);
                report.dropped.push(dropped("gn.p2.alpha2_inside_quaternionic_extension", &container));
            } else {
                report.dropped.push(dropped("gn.p2.alpha2_valuation_zero_copy", &quaternionic));
                report.classes.push(label);
            }
        } else {
            let kind = GroupKind::extension(f0, checked_order(r1 as u128 * r2 as u128 * shape.m as u128)?);
            report.classes.push(GroupClassLabel::new(kind, "gn.p2.odd_part_extension", 1));
        }
    }
    if shape.k == 2 {
        if input.u_is_pm1_mod8() {
            let kind = GroupKind::extension(quaternionic, n as u64);
            report.classes.push(GroupClassLabel::new(kind, "gn.p2.quaternionic_extension", 1));
        } else {
            report.classes.push(GroupClassLabel::new(quaternionic, "gn.p2.quaternionic_unextended", 1));
        }
    }
    Ok(())
}

/// The explicit n = 2 tables for p ∈ {2, 3}.
pub fn n2_table(input: &ClassificationInput) -> Result<ClassificationReport> {
    if input.n != 2 || !(input.p == 2 || input.p == 3) {
        return Err(Error::NotApplicable("explicit tables exist for n = 2 and p in {2, 3}".into()));
    }
    let mut report = ClassificationReport::new("maximal_in_gn", input.report_input());
    let class = |k: GroupKind, prov: &str| GroupClassLabel::new(k, prov, 1);
    let drop = |k: GroupKind, prov: &str, container: &GroupKind, rule: &str| DroppedClass {
        label: k.to_string(),
        order: k.order(),
        provenance: prov.into(),
        contained_in: container.to_string(),
        rule: rule.into(),
        structure: k,
    };
    let c = GroupKind::cyclic;
    let klein = GroupKind::product(vec![c(2), c(2)]);
    if input.p == 3 {
        let sd16 = GroupKind::SD16;
        report.classes.push(class(sd16.clone(), "n2.p3.frobenius"));
        if input.u_residue % 3 == 1 {
            report.classes.push(class(GroupKind::semidirect(c(3), GroupKind::Q8), "n2.p3.ramified.u_square"));
            report.dropped.push(drop(klein, "n2.p3.rational_quadratic", &sd16, "inside_frobenius_class"));
        } else {
            report.classes.push(class(GroupKind::semidirect(c(3), GroupKind::D8), "n2.p3.ramified.minus_u_square"));
            report.dropped.push(drop(c(4), "n2.p3.rational_quadratic", &sd16, "inside_frobenius_class"));
        }
        return Ok(report);
    }
    let split = GroupKind::metacyclic(6, 2, 5);
    let nonsplit = GroupKind::metacyclic(3, 4, 2);
    match input.u_mod8() {
        1 => {
            let o48 = GroupKind::O48;
            report.classes.push(class(split.clone(), "n2.p2.alpha1.split"));
            report.classes.push(class(o48.clone(), "n2.p2.quaternionic_extension"));
            report.dropped.push(drop(nonsplit, "n2.p2.alpha1.nonsplit", &o48, "inside_quaternionic_extension"));
            report.dropped.push(drop(GroupKind::Q16, "n2.p2.alpha2.full", &o48, "inside_quaternionic_extension"));
            report.dropped.push(drop(c(4), "n2.p2.rational_quadratic", &o48, "inside_quaternionic_extension"));
            report.dropped.push(drop(klein, "n2.p2.rational_quadratic", &split, "inside_alpha1_class"));
        }
        7 => {
            let gl = GroupKind::semidirect(GroupKind::T24, c(2));
            report.classes.push(class(nonsplit.clone(), "n2.p2.alpha1.nonsplit"));
            report.classes.push(class(gl.clone(), "n2.p2.quaternionic_extension"));
            report.dropped.push(drop(split, "n2.p2.alpha1.split", &gl, "inside_quaternionic_extension"));
            report.dropped.push(drop(GroupKind::SD16, "n2.p2.alpha2.full", &gl, "inside_quaternionic_extension"));
            report.dropped.push(drop(klein, "n2.p2.rational_quadratic", &gl, "inside_quaternionic_extension"));
            report.dropped.push(drop(c(4), "n2.p2.rational_quadratic", &nonsplit, "inside_alpha1_class"));
        }
        r => {
            let (dihedral, prov) = if r == 3 {
                (GroupKind::D8, "n2.p2.alpha2.full.u_3")
            } else {
                (GroupKind::Q8, "n2.p2.alpha2.full.u_minus_3")
            };
            report.classes.push(class(nonsplit.clone(), "n2.p2.alpha1.nonsplit"));
            report.classes.push(class(split.clone(), "n2.p2.alpha1.split"));
            report.classes.push(class(dihedral, prov));
            report.classes.push(class(GroupKind::T24, "n2.p2.quaternionic_unextended"));
            report.dropped.push(drop(
                GroupKind::Q8,
                "n2.p2.alpha2.full.valuation_zero",
                &GroupKind::T24,
                "inside_quaternionic_class",
            ));
            report.dropped.push(drop(klein, "n2.p2.rational_quadratic", &split, "inside_alpha1_class"));
            report.dropped.push(drop(c(4), "n2.p2.rational_quadratic", &nonsplit, "inside_alpha1_class"));
        }
    }
    Ok(report)
}

/// Outcome of comparing the general engine with the n = 2 tables.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CrossCheck {
    pub input: ClassificationInput,
    /// (general label, table label) pairs matched class by class.
    pub matched: Vec<(String, String)>,
    /// General classes the table shows to be non-maximal:
    /// (general label, table candidate, containing table class).
    pub resolved: Vec<(String, String, String)>,
    /// General or table classes without a counterpart.
    pub unmatched: Vec<String>,
    pub consistent: bool,
}

/// Whether the exact type `t` is a possible value of the engine's `g`.
fn refines(g: &GroupKind, t: &GroupKind) -> bool {
    if g.order() != t.order() {
        return false;
    }
    match g {
        GroupKind::Extension { kernel, quotient_order } => t.has_normal_subgroup(kernel, *quotient_order) == Some(true),
        _ => g == t,
    }
}

/// Compares [`maximal_in_gn_general`] with [`n2_table`] for one input.
pub fn cross_check_n2(input: &ClassificationInput) -> Result<CrossCheck> {
    let general = maximal_in_gn_general(input)?;
    let table = n2_table(input)?;
    let mut matched = Vec::new();
    let mut resolved = Vec::new();
    let mut unmatched = Vec::new();
    let mut used = vec![false; general.classes.len()];
    for t in &table.classes {
        let hit = general
            .classes
            .iter()
            .enumerate()
            .find(|(i, g)| !used[*i] && g.count == t.count && refines(&g.structure, &t.structure));
        match hit {
            Some((i, g)) => {
                used[i] = true;
                matched.push((g.label.clone(), t.label.clone()));
            }
            None => unmatched.push(t.label.clone()),
        }
    }
    for (i, g) in general.classes.iter().enumerate() {
        if used[i] {
            continue;
        }
        let witness = table.dropped.iter().find(|d| {
            refines(&g.structure, &d.structure)
                && table
                    .classes
                    .iter()
                    .any(|c| c.label == d.contained_in && d.structure.embeds_in(&c.structure) == Containment::Yes)
        });
        match witness {
            Some(d) => resolved.push((g.label.clone(), d.label.clone(), d.contained_in.clone())),
            None => unmatched.push(g.label.clone()),
        }
    }
    let consistent = unmatched.is_empty();
    Ok(CrossCheck { input: input.clone(), matched, resolved, unmatched, consistent })
}

/// Outcome of extending T_24 × C_{2^m−1} to order n·|T_24 × C_{2^m−1}|.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuaternionicExtension {
    pub n: u32,
    pub m: u32,
    pub u_mod8: u64,
    pub exists: bool,
    /// 48m(2^m − 1).
    pub order: u64,
    pub unique: bool,
    /// Isomorphism type when known (n = 2), else the extension shape.
    pub label: Option<String>,
}

/// Whether T_24 × C_{2^m−1} ⊂ S_n extends to order 48m(2^m−1) in G_n(u).
pub fn quaternionic_extension(p: u32, n: u32, u: i64) -> Result<QuaternionicExtension> {
    if p != 2 {
        return Err(Error::NotApplicable("quaternionic subgroups occur only for p = 2".into()));
    }
    if n % 4 != 2 {
        return Err(Error::NotApplicable(format!("n = {n} is not 2 mod 4, so S_n contains no Q_8")));
    }
    if u.rem_euclid(2) == 0 {
        return Err(Error::InvalidInput(format!("u = {u} is not a 2-adic unit")));
    }
    let m = n / 2;
    let u8 = u.rem_euclid(8) as u64;
    let exists = matches!(u8, 1 | 7);
    let order = checked_order(48u128 * m as u128 * prime_power_minus_one(2, m)? as u128)?;
    let label = exists.then(|| {
        if m == 1 {
            if u8 == 1 { GroupKind::O48 } else { GroupKind::semidirect(GroupKind::T24, GroupKind::cyclic(2)) }
                .to_string()
        } else {
            let base = GroupKind::product(vec![GroupKind::T24, GroupKind::cyclic((1u64 << m) - 1)]);
            GroupKind::extension(base, n as u64).to_string()
        }
    });
    Ok(QuaternionicExtension { n, m, u_mod8: u8, exists, order, unique: exists, label })
}

/// Unit residues used by [`scan`]: all units mod p² (p odd) or mod 8.
pub fn unit_residues(p: u32) -> Vec<u64> {
    let m = residue_modulus(p);
    (1..m).filter(|r| gcd(*r, p as u64) == 1).collect()
}

/// [`maximal_in_gn`] over every prime p ≤ `max_p`, 1 ≤ n ≤ `max_n` and every
/// unit residue, in input order.
pub fn scan(max_p: u32, max_n: u32) -> Result<Vec<ClassificationReport>> {
    check_grid(max_p, max_n)?;
    let inputs: Vec<ClassificationInput> = (2..=max_p)
        .filter(|&p| is_prime(p as u64))
        .flat_map(|p| {
            (1..=max_n)
                .flat_map(move |n| unit_residues(p).into_iter().map(move |r| ClassificationInput::new(p, n, r as i64)))
        })
        .collect::<Result<_>>()?;
    inputs.par_iter().map(maximal_in_gn).collect()
}
