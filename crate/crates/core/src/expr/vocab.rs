//! Element vocabularies used to classify MathML nodes.

/// Elements that form the wrapper chain around an expression.
pub const WRAPPERS: &[&str] = &["math", "semantics", "annotation", "annotation-xml"];

pub const PRESENTATION: &[&str] = &[
    "maction",
    "maligngroup",
    "malignmark",
    "menclose",
    "merror",
    "mfenced",
    "mfrac",
    "mglyph",
    "mi",
    "mlabeledtr",
    "mlongdiv",
    "mmultiscripts",
    "mn",
    "mo",
    "mover",
    "mpadded",
    "mphantom",
    "mprescripts",
    "mroot",
    "mrow",
    "ms",
    "mscarries",
    "mscarry",
    "msgroup",
    "msline",
    "mspace",
    "msqrt",
    "msrow",
    "mstack",
    "mstyle",
    "msub",
    "msubsup",
    "msup",
    "mtable",
    "mtd",
    "mtext",
    "mtr",
    "munder",
    "munderover",
    "none",
];

/// Content MathML containers, token elements and operator elements.
pub const CONTENT: &[&str] = &[
    // tokens and containers
    "apply",
    "bind",
    "bvar",
    "ci",
    "cn",
    "condition",
    "csymbol",
    "cerror",
    "cs",
    "degree",
    "domainofapplication",
    "interval",
    "lambda",
    "list",
    "logbase",
    "lowlimit",
    "matrix",
    "matrixrow",
    "momentabout",
    "otherwise",
    "piece",
    "piecewise",
    "reln",
    "set",
    "share",
    "uplimit",
    "vector",
    "declare",
    "fn",
    "sep",
    // arithmetic, algebra, logic
    "abs",
    "and",
    "arg",
    "ceiling",
    "compose",
    "conjugate",
    "divide",
    "exists",
    "exp",
    "factorial",
    "factorof",
    "floor",
    "forall",
    "gcd",
    "ident",
    "imaginary",
    "implies",
    "inverse",
    "lcm",
    "ln",
    "log",
    "max",
    "min",
    "minus",
    "not",
    "or",
    "plus",
    "power",
    "quotient",
    "real",
    "rem",
    "root",
    "times",
    "xor",
    // relations
    "approx",
    "eq",
    "equivalent",
    "geq",
    "gt",
    "leq",
    "lt",
    "neq",
    // calculus, sets, sequences
    "curl",
    "diff",
    "divergence",
    "grad",
    "int",
    "laplacian",
    "limit",
    "partialdiff",
    "tendsto",
    "card",
    "cartesianproduct",
    "in",
    "intersect",
    "notin",
    "notprsubset",
    "notsubset",
    "prsubset",
    "setdiff",
    "subset",
    "union",
    "product",
    "sum",
    // elementary functions
    "arccos",
    "arccosh",
    "arccot",
    "arccoth",
    "arccsc",
    "arccsch",
    "arcsec",
    "arcsech",
    "arcsin",
    "arcsinh",
    "arctan",
    "arctanh",
    "cos",
    "cosh",
    "cot",
    "coth",
    "csc",
    "csch",
    "sec",
    "sech",
    "sin",
    "sinh",
    "tan",
    "tanh",
    // statistics, linear algebra
    "mean",
    "median",
    "mode",
    "moment",
    "sdev",
    "variance",
    "determinant",
    "outerproduct",
    "scalarproduct",
    "selector",
    "transpose",
    "vectorproduct",
    // constants
    "complexes",
    "emptyset",
    "eulergamma",
    "exponentiale",
    "false",
    "imaginaryi",
    "infinity",
    "integers",
    "naturalnumbers",
    "notanumber",
    "pi",
    "primes",
    "rationals",
    "reals",
    "true",
];

pub fn is_wrapper(label: &str) -> bool {
    WRAPPERS.contains(&label)
}

pub fn is_presentation(label: &str) -> bool {
    PRESENTATION.contains(&label)
}

pub fn is_content(label: &str) -> bool {
    CONTENT.contains(&label)
}

/// Named entities beyond the five predefined XML ones that show up in
/// MathML sources.
pub fn mathml_entity(name: &str) -> Option<&'static str> {
    let s = match name {
        "InvisibleTimes" | "it" => "\u{2062}",
        "ApplyFunction" | "af" => "\u{2061}",
        "InvisibleComma" | "ic" => "\u{2063}",
        "InvisiblePlus" => "\u{2064}",
        "DifferentialD" | "dd" => "\u{2146}",
        "ExponentialE" | "ee" => "\u{2147}",
        "ImaginaryI" | "ii" => "\u{2148}",
        "pi" => "π",
        "infin" | "infty" => "∞",
        "int" | "Integral" => "∫",
        "sum" | "Sum" => "∑",
        "prod" | "Product" => "∏",
        "PlusMinus" | "pm" => "±",
        "minus" => "\u{2212}",
        "times" => "×",
        "middot" | "centerdot" => "·",
        "sdot" => "⋅",
        "le" | "leq" => "≤",
        "ge" | "geq" => "≥",
        "ne" => "≠",
        "isin" | "in" | "Element" => "∈",
        "rarr" | "rightarrow" | "RightArrow" | "to" => "→",
        "partial" | "PartialD" => "∂",
        "nabla" | "Del" => "∇",
        "nbsp" | "NonBreakingSpace" => "\u{a0}",
        "ThinSpace" => "\u{2009}",
        "lpar" => "(",
        "rpar" => ")",
        "hellip" => "…",
        "deg" => "°",
        "alpha" => "α",
        "beta" => "β",
        "gamma" => "γ",
        "delta" => "δ",
        "epsilon" | "epsi" => "ε",
        "zeta" => "ζ",
        "eta" => "η",
        "theta" => "θ",
        "iota" => "ι",
        "kappa" => "κ",
        "lambda" => "λ",
        "mu" => "μ",
        "nu" => "ν",
        "xi" => "ξ",
        "rho" => "ρ",
        "sigma" => "σ",
        "tau" => "τ",
        "phi" => "φ",
        "chi" => "χ",
        "psi" => "ψ",
        "omega" => "ω",
        "Gamma" => "Γ",
        "Delta" => "Δ",
        "Theta" => "Θ",
        "Lambda" => "Λ",
        "Pi" => "Π",
        "Sigma" => "Σ",
        "Phi" => "Φ",
        "Psi" => "Ψ",
        "Omega" => "Ω",
        _ => return None,
    };
    Some(s)
}
