use std::fmt;

use super::store::{ConceptId, Individual};

/// A labelled concept `a:C`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fact {
    pub label: Individual,
    pub concept: ConceptId,
}

impl Fact {
    pub fn new(label: Individual, concept: ConceptId) -> Fact {
        Fact { label, concept }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rule {
    Clash,
    NotNot,
    NotOr,
    Or,
    Exists,
    NotExists,
    Sym,
    NotSym,
    Mon,
    Refl,
    ExistsOr,
    NotExistsOr,
    ExistsInv,
    NotExistsInv,
    ExistsNot,
    NotExistsNot,
    ExistsId,
    NotExistsId,
    UB,
}

impl Rule {
    pub const ALL: [Rule; 19] = [
        Rule::Clash,
        Rule::NotNot,
        Rule::NotOr,
        Rule::Or,
        Rule::Exists,
        Rule::NotExists,
        Rule::Sym,
        Rule::NotSym,
        Rule::Mon,
        Rule::Refl,
        Rule::ExistsOr,
        Rule::NotExistsOr,
        Rule::ExistsInv,
        Rule::NotExistsInv,
        Rule::ExistsNot,
        Rule::NotExistsNot,
        Rule::ExistsId,
        Rule::NotExistsId,
        Rule::UB,
    ];

    pub fn is_branching(self) -> bool {
        matches!(
            self,
            Rule::Or | Rule::ExistsOr | Rule::NotExistsNot | Rule::UB
        )
    }

    /// Every rule except (∃) leaves the set of individuals unchanged.
    pub fn is_type_completing(self) -> bool {
        self != Rule::Exists
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Rule::Clash => "⊥",
            Rule::NotNot => "¬¬",
            Rule::NotOr => "¬⊔",
            Rule::Or => "⊔",
            Rule::Exists => "∃",
            Rule::NotExists => "¬∃",
            Rule::Sym => "sym",
            Rule::NotSym => "¬sym",
            Rule::Mon => "mon",
            Rule::Refl => "refl",
            Rule::ExistsOr => "∃⊔",
            Rule::NotExistsOr => "¬∃⊔",
            Rule::ExistsInv => "∃⁻¹",
            Rule::NotExistsInv => "¬∃⁻¹",
            Rule::ExistsNot => "∃¬",
            Rule::NotExistsNot => "¬∃¬",
            Rule::ExistsId => "∃id",
            Rule::NotExistsId => "¬∃id",
            Rule::UB => "ub",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.symbol())
    }
}

/// A rule together with the premises it is applied to. For (refl) the
/// premise is the first fact mentioning `subject`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RuleInstance {
    pub rule: Rule,
    pub first: Fact,
    pub second: Option<Fact>,
    pub subject: Option<Individual>,
}

impl RuleInstance {
    pub fn unary(rule: Rule, first: Fact) -> RuleInstance {
        RuleInstance {
            rule,
            first,
            second: None,
            subject: None,
        }
    }

    pub fn binary(rule: Rule, first: Fact, second: Fact) -> RuleInstance {
        RuleInstance {
            rule,
            first,
            second: Some(second),
            subject: None,
        }
    }

    pub fn refl(first: Fact, subject: Individual) -> RuleInstance {
        RuleInstance {
            rule: Rule::Refl,
            first,
            second: None,
            subject: Some(subject),
        }
    }

    pub fn premises(&self) -> impl Iterator<Item = Fact> {
        std::iter::once(self.first).chain(self.second)
    }
}
