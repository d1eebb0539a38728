//! Many-sorted signatures: sorts and the generators that build their trees.

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct SortId(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct GenId(pub u32);

impl SortId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl GenId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub name: String,
    pub args: Vec<SortId>,
    pub result: SortId,
}

impl Generator {
    pub fn arity(&self) -> usize {
        self.args.len()
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SignatureError {
    #[error("sort `{0}` has only one generator; every sort needs at least two")]
    SingularSort(String),
    #[error("sort `{0}` has no generators")]
    EmptySort(String),
    #[error("unknown sort `{0}`")]
    UnknownSort(String),
    #[error("sort `{0}` declared twice")]
    DuplicateSort(String),
    #[error("generator `{0}` declared twice")]
    DuplicateGenerator(String),
    #[error("name `{0}` uses a reserved prefix")]
    ReservedName(String),
}

/// Prefixes used for solver-generated variables. User-declared names may not
/// start with them.
pub const RESERVED_PREFIXES: [&str; 2] = ["_v", "$"];

pub fn is_reserved_name(name: &str) -> bool {
    RESERVED_PREFIXES.iter().any(|p| name.starts_with(p))
}

#[derive(Clone, Debug)]
pub struct Signature {
    sorts: Vec<String>,
    generators: Vec<Generator>,
    by_sort: Vec<Vec<GenId>>,
    sort_index: HashMap<String, SortId>,
    gen_index: HashMap<String, GenId>,
}

/// Collects declarations by name; references are resolved in `build`, so
/// generators may mention sorts declared after them.
#[derive(Clone, Debug, Default)]
pub struct SignatureBuilder {
    sorts: Vec<String>,
    generators: Vec<(String, Vec<String>, String)>,
}

impl SignatureBuilder {
    pub fn sort(&mut self, name: &str) -> &mut Self {
        self.sorts.push(name.to_string());
        self
    }

    pub fn generator(&mut self, name: &str, args: &[&str], result: &str) -> &mut Self {
        self.generators.push((
            name.to_string(),
            args.iter().map(|s| s.to_string()).collect(),
            result.to_string(),
        ));
        self
    }

    pub fn generator_owned(
        &mut self,
        name: String,
        args: Vec<String>,
        result: String,
    ) -> &mut Self {
        self.generators.push((name, args, result));
        self
    }

    pub fn has_sort(&self, name: &str) -> bool {
        self.sorts.iter().any(|s| s == name)
    }

    pub fn has_generator(&self, name: &str) -> bool {
        self.generators.iter().any(|g| g.0 == name)
    }

    pub fn build(&self) -> Result<Signature, SignatureError> {
        let mut sort_index = HashMap::new();
        for (i, s) in self.sorts.iter().enumerate() {
            if is_reserved_name(s) {
                return Err(SignatureError::ReservedName(s.clone()));
            }
            if sort_index.insert(s.clone(), SortId(i as u32)).is_some() {
                return Err(SignatureError::DuplicateSort(s.clone()));
            }
        }
        let lookup = |n: &String| {
            sort_index
                .get(n)
                .copied()
                .ok_or_else(|| SignatureError::UnknownSort(n.clone()))
        };
        let mut generators = Vec::new();
        let mut gen_index = HashMap::new();
        let mut by_sort = vec![Vec::new(); self.sorts.len()];
        for (i, (name, args, result)) in self.generators.iter().enumerate() {
            if is_reserved_name(name) {
                return Err(SignatureError::ReservedName(name.clone()));
            }
            let id = GenId(i as u32);
            if gen_index.insert(name.clone(), id).is_some() {
                return Err(SignatureError::DuplicateGenerator(name.clone()));
            }
            let args = args.iter().map(lookup).collect::<Result<Vec<_>, _>>()?;
            let result = lookup(result)?;
            by_sort[result.index()].push(id);
            generators.push(Generator {
                name: name.clone(),
                args,
                result,
            });
        }
        Ok(Signature {
            sorts: self.sorts.clone(),
            generators,
            by_sort,
            sort_index,
            gen_index,
        })
    }
}

impl Signature {
    pub fn builder() -> SignatureBuilder {
        SignatureBuilder::default()
    }

    /// Checks that every sort has at least two generators.
    pub fn validate(&self) -> Result<(), SignatureError> {
        for s in self.sorts() {
            match self.generators_of(s).len() {
                0 => return Err(SignatureError::EmptySort(self.sort_name(s).to_string())),
                1 => return Err(SignatureError::SingularSort(self.sort_name(s).to_string())),
                _ => {}
            }
        }
        Ok(())
    }

    pub fn sorts(&self) -> impl Iterator<Item = SortId> + '_ {
        (0..self.sorts.len() as u32).map(SortId)
    }

    pub fn num_sorts(&self) -> usize {
        self.sorts.len()
    }

    pub fn generator_ids(&self) -> impl Iterator<Item = GenId> + '_ {
        (0..self.generators.len() as u32).map(GenId)
    }

    pub fn sort_name(&self, s: SortId) -> &str {
        &self.sorts[s.index()]
    }

    pub fn sort(&self, name: &str) -> Option<SortId> {
        self.sort_index.get(name).copied()
    }

    pub fn generator_by_name(&self, name: &str) -> Option<GenId> {
        self.gen_index.get(name).copied()
    }

    pub fn generator(&self, g: GenId) -> &Generator {
        &self.generators[g.index()]
    }

    pub fn gen_name(&self, g: GenId) -> &str {
        &self.generators[g.index()].name
    }

    /// Generators with result sort `s`, in declaration order.
    pub fn generators_of(&self, s: SortId) -> &[GenId] {
        &self.by_sort[s.index()]
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in self.sorts() {
            write!(f, "{} ::=", self.sort_name(s))?;
            for (i, g) in self.generators_of(s).iter().enumerate() {
                let gen = self.generator(*g);
                let sep = if i == 0 { " " } else { " | " };
                write!(f, "{sep}{}", gen.name)?;
                if !gen.args.is_empty() {
                    let args: Vec<_> = gen.args.iter().map(|a| self.sort_name(*a)).collect();
                    write!(f, "({})", args.join(", "))?;
                }
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

pub fn validate_signature(sig: &Signature) -> Result<(), SignatureError> {
    sig.validate()
}

/// The six-sort signature used throughout the tests and examples: booleans,
/// naturals, lists of naturals, purely infinite binary trees and two mixed sorts.
pub fn example_signature() -> Signature {
    let mut b = Signature::builder();
    for s in ["bool", "nat", "list", "inftree", "d", "t"] {
        b.sort(s);
    }
    b.generator("false", &[], "bool")
        .generator("true", &[], "bool")
        .generator("zero", &[], "nat")
        .generator("succ", &["nat"], "nat")
        .generator("nil", &[], "list")
        .generator("cons", &["nat", "list"], "list")
        .generator("tree1", &["inftree"], "inftree")
        .generator("tree2", &["inftree", "inftree"], "inftree")
        .generator("c1", &["bool"], "d")
        .generator("c2", &["nat", "inftree"], "d")
        .generator("g1", &["bool", "bool"], "t")
        .generator("g2", &["bool", "nat"], "t");
    b.build().expect("example signature is well formed")
}
