//! The public exact-moment API and the catalog of printed closed forms.
//!
//! Moments of the induced purity `T = Σ x_i²` are assembled from moment-matrix
//! traces and exact kernel-product integrals. Purity moments follow from
//! `E_f[P^k] = E_h[T^k] / (d)_{2k}`. Every assembled value is checked against
//! the stored closed forms whenever one applies.

use std::collections::HashMap;
use std::sync::OnceLock;

use crate::kernel_integrals::{c_block, d_block, g_cross, pair_trace, BilinearContext};
use crate::ratcore::{gamma_half_integer, int, parse_polyfrac, polyfrac_eval, rat, rising_factorial, PiRational, PolyFraction, RatError, Rational};
use crate::recurrence::{CoeffTables, EnsembleParams, MatrixKind, RecurrenceError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ClosedFormError {
    #[error("assembled value {assembled} disagrees with catalog entry `{entry}` = {catalog}")]
    Consistency { entry: &'static str, assembled: Rational, catalog: Rational },
    #[error("unknown catalog entry `{0}`")]
    UnknownEntry(String),
    #[error("moment order {0} is not supported (1, 2 or 3)")]
    Order(u32),
    #[error(transparent)]
    Recurrence(#[from] RecurrenceError),
    #[error(transparent)]
    Rat(#[from] RatError),
    #[error("kernel integral: {0}")]
    Kernel(String),
}

/// Closed forms as `(name, expression)`. Entries in `n` use physical dimensions;
/// the rest use `m` and `alpha`.
///
/// `pair_22_printed` is stored as printed and is only correct for `m <= 2`;
/// `pair_22` is the exact replacement.
pub const CATALOG_SOURCES: &[(&str, &str)] = &[
    ("mP1", "(m^2-2*m*n-4*n^2-1)/(2*n*(m^2-2*m*n-2))"),
    (
        "mP2",
        "(m^6-6*m^5*n+4*m^4*n^2+6*m^4+24*m^3*n^3-24*m^3*n-16*m^2*n^4+112*m^2*n^2-107*m^2-32*m*n^5-176\
         *m*n^3+214*m*n-128*n^4-32*n^2+160)/(4*(n^2-1)*(m^2-2*m*n-2)*(m^2-2*m*n-4)*(m^2-2*m*n-6))",
    ),
    (
        "mP3",
        "(m^(10)*n^2-2*m^(10)-10*m^9*n^3+20*m^9*n+28*m^8*n^4-35*m^8*n^2+22*m^8+16*m^7*n^5-200*m^7*n^3\
         -176*m^7*n-160*m^6*n^6+992*m^6*n^4-697*m^6*n^2+642*m^6+64*m^5*n^7-1808*m^5*n^5+6646*m^5*n^3-\
         3852*m^5*n+320*m^4*n^8+320*m^4*n^6-9208*m^4*n^4+13715*m^4*n^2-9262*m^4-128*m^3*n^9+4480*m^3*\
         n^7-10760*m^3*n^5-29180*m^3*n^3+37048*m^3*n-256*m^2*n^(10)-3520*m^2*n^8+30032*m^2*n^6-48052*\
         m^2*n^4-6520*m^2*n^2+31640*m^2-3072*m*n^9-18944*m*n^7+144192*m*n^5-61056*m*n^3-63280*m*n-102\
         40*n^8+15360*n^6+132480*n^4-114560*n^2-23040)/(8*n*(n^2-1)*(n^2-4)*(m^2-2*m*n-2)*(m^2-2*m*n-\
         4)*(m^2-2*m*n-6)*(m^2-2*m*n-8)*(m^2-2*m*n-10))",
    ),
    ("mP2_mn", "5*(5*m^4+47*m^2+32)/(4*(m^2+2)*(m^2+4)*(m^2+6))"),
    ("mP3_mn", "5*(25*m^8+690*m^6+6015*m^4+8750*m^2+1152)/(8*m*(m^2+2)*(m^2+4)*(m^2+6)*(m^2+8)*(m^2+10))"),
    ("mP1_alpha", "(5*m^2+10*alpha*m+5*m+4*alpha^2+4*alpha+2)/((2*m+2*alpha+1)*(m^2+2*alpha*m+m+2))"),
    ("EhT", "m*(2*alpha+m+1)*(4*alpha^2+4*alpha+5*m^2+10*alpha*m+5*m+2)/(4*(2*alpha+2*m+1))"),
    (
        "EhT2",
        "m*(2*alpha+m+1)*(128*alpha^4+256*alpha^3+224*alpha^2+96*alpha+25*m^6+150*alpha*m^5+75*m^5+34\
         0*alpha^2*m^4+340*alpha*m^4+295*m^4+360*alpha^3*m^3+540*alpha^2*m^3+1110*alpha*m^3+465*m^3+1\
         76*alpha^4*m^2+352*alpha^3*m^2+1448*alpha^2*m^2+1272*alpha*m^2+232*m^2+32*alpha^5*m+80*alpha\
         ^4*m+768*alpha^3*m+1072*alpha^2*m+376*alpha*m+12*m-144)/(16*(2*alpha+2*m-1)*(2*alpha+2*m+3))",
    ),
    (
        "pair_22_printed",
        "-m^2*(2*alpha+m+1)^2*(8*alpha^2-56*alpha^4+12*alpha*m-28*alpha^2*m-264*alpha^3*m+m^2-66*alph\
         a*m^2-454*alpha^2*m^2+8*alpha^4*m^2-32*m^3-324*alpha*m^3+4*alpha^2*m^3+24*alpha^3*m^3-81*m^4\
         +6*alpha*m^4+26*alpha^2*m^4+2*m^5+12*alpha*m^5+2*m^6)/(48*(2*alpha+2*m+1)^2)",
    ),
    (
        "pair_22",
        "m*(2*alpha+m+1)*(64*alpha^6+672*alpha^5*m-256*alpha^5+2352*alpha^4*m^2-1552*alpha^4*m+304*al\
         pha^4+3864*alpha^3*m^3-3344*alpha^3*m^2+1072*alpha^3*m-64*alpha^3+3276*alpha^2*m^4-3340*alph\
         a^2*m^3+1352*alpha^2*m^2-48*alpha^2*m-80*alpha^2+1386*alpha*m^5-1564*alpha*m^4+730*alpha*m^3\
         +8*alpha*m^2-136*alpha*m+32*alpha+231*m^6-275*m^5+141*m^4+7*m^3-48*m^2+16*m)/(16*(2*alpha+2*\
         m-1)*(2*alpha+2*m+1)^2)",
    ),
    (
        "cross_22",
        "-m^2*(2*alpha+m+1)^2*(32*alpha^4+64*alpha^3+12*alpha^2-20*alpha+33*m^4+132*alpha*m^3+66*m^3+\
         196*alpha^(2)*m^2+196*alpha*m^2+15*m^2+128*alpha^(3)*m+192*alpha^(2)*m+28*alpha*m-18*m-6)/(8\
         *(2*alpha+2*m-1)*(2*alpha+2*m+1)^2*(2*alpha+2*m+3))",
    ),
    (
        "I1",
        "(1024*alpha^(11)+5632*alpha^(10)+48640*alpha^9+176640*alpha^8+278592*alpha^7+190176*alpha^6-\
         522880*alpha^5-1398640*alpha^4-930016*alpha^3-10608*alpha^2+260640*alpha+7293*m^(11)+87516*a\
         lpha*m^(10)+43758*m^(10)+463320*alpha^2*m^9+463320*alpha*m^9+139425*m^9+1424280*alpha^3*m^8+\
         2136420*alpha^2*m^8+1304160*alpha*m^8+296010*m^8+2814240*alpha^4*m^7+5628480*alpha^3*m^7+526\
         8120*alpha^2*m^7+2453880*alpha*m^7+253539*m^7+3734016*alpha^5*m^6+9335040*alpha^4*m^6+120463\
         20*alpha^3*m^6+8734440*alpha^2*m^6+1728012*alpha*m^6-280566*m^6+3370752*alpha^6*m^5+10112256\
         *alpha^5*m^5+17149440*alpha^4*m^5+17445120*alpha^3*m^5+5120808*alpha^2*m^5-1916376*alpha*m^5\
         -1049565*m^5+2048640*alpha^7*m^4+7170240*alpha^6*m^4+15708000*alpha^5*m^4+21344400*alpha^4*m\
         ^4+8657880*alpha^3*m^4-4772460*alpha^2*m^4-5481960*alpha*m^4-1404810*m^4+808320*alpha^8*m^3+\
         3233280*alpha^7*m^3+9199680*alpha^6*m^3+16282560*alpha^5*m^3+9014040*alpha^4*m^3-5337360*alp\
         ha^3*m^3-10695600*alpha^2*m^3-5852040*alpha*m^3-806532*m^3+192000*alpha^9*m^2+864000*alpha^8\
         *m^2+3285120*alpha^7*m^2+7465920*alpha^6*m^2+5693184*alpha^5*m^2-2415840*alpha^4*m^2-9654240\
         *alpha^3*m^2-8908560*alpha^2*m^2-2411328*alpha*m^2+49608*m^2+23552*alpha^(10)*m+117760*alpha\
         ^9*m+635520*alpha^8*m+1835520*alpha^7*m+1970304*alpha^6*m-18816*alpha^5*m-3921560*alpha^4*m-\
         5905840*alpha^3*m-2513736*alpha^2*m+165456*alpha*m+246240*m+86400)/(32*(2*alpha+2*m+-3)*(2*a\
         lpha+2*m+-1)*(2*alpha+2*m+1)*(2*alpha+2*m+3)*(2*alpha+2*m+5))",
    ),
    (
        "I2",
        "(2*alpha+m)*(2*alpha+m+1)*(256*alpha^8-1152*alpha^7+4032*alpha^6-1440*alpha^5-22656*alpha^4+\
         55152*alpha^3-60832*alpha^2+33840*alpha+1155*m^8+9240*alpha*m^7-1518*m^7+31164*alpha^2*m^6-1\
         1802*alpha*m^6+1506*m^6+57624*alpha^3*m^5-37896*alpha^2*m^5+10074*alpha*m^5+6024*m^5+63504*a\
         lpha^4*m^4-64992*alpha^3*m^4+30456*alpha^2*m^4+32502*alpha*m^4-32145*m^4+42336*alpha^5*m^3-6\
         3936*alpha^4*m^3+51168*alpha^3*m^3+60576*alpha^2*m^3-137754*alpha*m^3+52158*m^3+16448*alpha^\
         6*m^2-35712*alpha^5*m^2+47744*alpha^4*m^2+44688*alpha^3*m^2-203716*alpha^2*m^2+174276*alpha*\
         m^2-51156*m^2+3328*alpha^7*m-10304*alpha^6*m+22432*alpha^5*m+8944*alpha^4*m-119864*alpha^3*m\
         +179416*alpha^2*m-116424*alpha*m+28296*m-7200)/(64*(2*alpha+2*m-3)*(2*alpha+2*m-1)*(2*alpha+\
         2*m+1)*(2*alpha+2*m+5))",
    ),
    (
        "A",
        "m^3*(2*alpha+m+1)^3*(4*alpha^2+4*alpha+5*m^2+10*alpha*m+5*m+2)^3/(64*m*(m-1)*(m-2)*(2*alpha+\
         2*m+1)^3)",
    ),
    (
        "B",
        "-3*m*(2*alpha+m+1)^2*(4*alpha^2+4*alpha+5*m^2+10*alpha*m+5*m+2)*(128*alpha^7-64*alpha^6-160*\
         alpha^5+272*alpha^4-160*alpha^3-64*alpha^2+48*alpha+462*m^7+3234*alpha*m^6+717*m^6+9324*alph\
         a^2*m^5+3924*alpha*m^5+219*m^5+14280*alpha^3*m^4+8316*alpha^2*m^4+546*alpha*m^4+243*m^4+1243\
         2*alpha^4*m^3+8448*alpha^3*m^3+72*alpha^2*m^3+1008*alpha*m^3-117*m^3+6048*alpha^5*m^2+3984*a\
         lpha^4*m^2-768*alpha^3*m^2+1632*alpha^2*m^2-336*alpha*m^2-96*m^2+1472*alpha^6*m+576*alpha^5*\
         m-688*alpha^4*m+1152*alpha^3*m-328*alpha^2*m-168*alpha*m+12*m)/(64*(m-2)*(m-1)*(2*alpha+2*m-\
         1)*(2*alpha+2*m+1)^3*(2*alpha+2*m+3))",
    ),
    (
        "C",
        "-3*m*(m+1)*(2*alpha+m+1)^2*(32*alpha^6-96*alpha^5-40*alpha^4+120*alpha^3+8*alpha^2-24*alpha+\
         15*m^6+120*alpha*m^5+384*alpha^2*m^4-36*alpha*m^4-48*m^4+624*alpha^3*m^3-192*alpha^2*m^3-234\
         *alpha*m^3+27*m^3+536*alpha^4*m^2-368*alpha^3*m^2-386*alpha^2*m^2+128*alpha*m^2+224*alpha^5*\
         m-304*alpha^4*m-240*alpha^3*m+208*alpha^2*m+4*alpha*m-12*m)/(8*(m-2)*(2*alpha+2*m-3)*(2*alph\
         a+2*m-1)*(2*alpha+2*m+1)^3*(2*alpha+2*m+3))",
    ),
    (
        "D",
        "(1024*alpha^(11)-9728*alpha^(10)+36352*alpha^9-64512*alpha^8+41280*alpha^7+30624*alpha^6-511\
         36*alpha^5+1712*alpha^4+17696*alpha^3-1296*alpha^2-2016*alpha+7293*m^(11)+87516*alpha*m^(10)\
         -12726*m^(10)+463320*alpha^2*m^9-158004*alpha*m^9+10539*m^9+1424280*alpha^3*m^8-844524*alpha\
         ^2*m^8+140976*alpha*m^8-5268*m^8+2814240*alpha^4*m^7-2560296*alpha^3*m^7+778452*alpha^2*m^7-\
         78504*alpha*m^7-20997*m^7+3734016*alpha^5*m^6-4871040*alpha^4*m^6+2355888*alpha^3*m^6-441336\
         *alpha^2*m^6-140292*alpha*m^6+22338*m^6+3370752*alpha^6*m^5-6061440*alpha^5*m^5+4330752*alph\
         a^4*m^5-1295856*alpha^3*m^5-365136*alpha^2*m^5+164100*alpha*m^5-5331*m^5+2048640*alpha^7*m^4\
         -4972224*alpha^6*m^4+5023200*alpha^5*m^4-2226960*alpha^4*m^4-438984*alpha^3*m^4+485940*alpha\
         ^2*m^4-47952*alpha*m^4-8424*m^4+808320*alpha^8*m^3-2632704*alpha^7*m^3+3668544*alpha^6*m^3-2\
         317824*alpha^5*m^3-169896*alpha^4*m^3+737688*alpha^3*m^3-159732*alpha^2*m^3-37032*alpha*m^3+\
         6048*m^3+192000*alpha^9*m^2-848640*alpha^8*m^2+1615488*alpha^7*m^2-1430208*alpha^6*m^2+13440\
         0*alpha^5*m^2+594912*alpha^4*m^2-248640*alpha^3*m^2-52704*alpha^2*m^2+25704*alpha*m^2+624*m^\
         2+23552*alpha^(10)*m-146432*alpha^9*m+383616*alpha^8*m-476160*alpha^7*m+152448*alpha^6*m+232\
         512*alpha^5*m-182552*alpha^4*m-24064*alpha^3*m+36216*alpha^2*m+576*alpha*m-1008*m)/(16*(m-2)\
         *(m-1)*(2*alpha+2*m-3)*(2*alpha+2*m-1)*(2*alpha+2*m+1)^3)",
    ),
    (
        "gamma_poly",
        "32*alpha^6-96*alpha^5-40*alpha^4+120*alpha^3+8*alpha^2-24*alpha+15*m^6+120*alpha*m^5+384*alp\
         ha^2*m^4-36*alpha*m^4-48*m^4+624*alpha^3*m^3-192*alpha^2*m^3-234*alpha*m^3+27*m^3+536*alpha^\
         4*m^2-368*alpha^3*m^2-386*alpha^2*m^2+128*alpha*m^2+224*alpha^5*m-304*alpha^4*m-240*alpha^3*\
         m+208*alpha^2*m+4*alpha*m-12*m",
    ),
    (
        "delta_poly",
        "1024*alpha^(11)-9728*alpha^(10)+36352*alpha^9-64512*alpha^8+41280*alpha^7+30624*alpha^6-5113\
         6*alpha^5+1712*alpha^4+17696*alpha^3-1296*alpha^2-2016*alpha+7293*m^(11)+87516*alpha*m^(10)-\
         12726*m^(10)+463320*alpha^2*m^9-158004*alpha*m^9+10539*m^9+1424280*alpha^3*m^8-844524*alpha^\
         2*m^8+140976*alpha*m^8-5268*m^8+2814240*alpha^4*m^7-2560296*alpha^3*m^7+778452*alpha^2*m^7-7\
         8504*alpha*m^7-20997*m^7+3734016*alpha^5*m^6-4871040*alpha^4*m^6+2355888*alpha^3*m^6-441336*\
         alpha^2*m^6-140292*alpha*m^6+22338*m^6+3370752*alpha^6*m^5-6061440*alpha^5*m^5+4330752*alpha\
         ^4*m^5-1295856*alpha^3*m^5-365136*alpha^2*m^5+164100*alpha*m^5-5331*m^5+2048640*alpha^7*m^4-\
         4972224*alpha^6*m^4+5023200*alpha^5*m^4-2226960*alpha^4*m^4-438984*alpha^3*m^4+485940*alpha^\
         2*m^4-47952*alpha*m^4-8424*m^4+808320*alpha^8*m^3-2632704*alpha^7*m^3+3668544*alpha^6*m^3-23\
         17824*alpha^5*m^3-169896*alpha^4*m^3+737688*alpha^3*m^3-159732*alpha^2*m^3-37032*alpha*m^3+6\
         048*m^3+192000*alpha^9*m^2-848640*alpha^8*m^2+1615488*alpha^7*m^2-1430208*alpha^6*m^2+134400\
         *alpha^5*m^2+594912*alpha^4*m^2-248640*alpha^3*m^2-52704*alpha^2*m^2+25704*alpha*m^2+624*m^2\
         +23552*alpha^(10)*m-146432*alpha^9*m+383616*alpha^8*m-476160*alpha^7*m+152448*alpha^6*m+2325\
         12*alpha^5*m-182552*alpha^4*m-24064*alpha^3*m+36216*alpha^2*m+576*alpha*m-1008*m",
    ),
    (
        "Pmoment3_alpha",
        "(81920*alpha^9+368640*alpha^8+614400*alpha^7+430080*alpha^6-1059840*alpha^5-2864640*alpha^4-\
         1894400*alpha^3-7680*alpha^2+529920*alpha+500*m^(13)+7000*alpha*m^(12)+3500*m^(12)+43700*alp\
         ha^2*m^(11)+43700*alpha*m^(11)+22225*m^(11)+160400*alpha^3*m^(10)+240600*alpha^2*m^(10)+2559\
         00*alpha*m^(10)+87850*m^(10)+384160*alpha^4*m^9+768320*alpha^3*m^9+1294380*alpha^2*m^9+91022\
         0*alpha*m^9+256845*m^9+629600*alpha^5*m^8+1574000*alpha^4*m^8+3783400*alpha^3*m^8+4101100*al\
         pha^2*m^8+2386800*alpha*m^8+562350*m^8+719616*alpha^6*m^7+2158848*alpha^5*m^7+7068480*alpha^\
         4*m^7+10538880*alpha^3*m^7+9593004*alpha^2*m^7+4683372*alpha*m^7+503935*m^7+572928*alpha^7*m\
         ^6+2005248*alpha^6*m^6+8807232*alpha^5*m^6+17004960*alpha^4*m^6+21867552*alpha^3*m^6+1679899\
         2*alpha^2*m^6+3491468*alpha*m^6-535010*m^6+311040*alpha^8*m^5+1244160*alpha^7*m^5+7396992*al\
         pha^6*m^5+17836416*alpha^5*m^5+31093200*alpha^4*m^5+33910560*alpha^3*m^5+10570948*alpha^2*m^\
         5-3618956*alpha*m^5-2077165*m^5+109568*alpha^9*m^4+493056*alpha^8*m^4+4122624*alpha^7*m^4+12\
         128256*alpha^6*m^4+28475808*alpha^5*m^4+42019344*alpha^4*m^4+18278216*alpha^3*m^4-8866596*al\
         pha^2*m^4-10838736*alpha*m^4-2813290*m^4+22528*alpha^(10)*m^3+112640*alpha^9*m^3+1452288*alp\
         ha^8*m^3+5133312*alpha^7*m^3+16659456*alpha^6*m^3+32484864*alpha^5*m^3+19378192*alpha^4*m^3-\
         9621472*alpha^3*m^3-21137424*alpha^2*m^3-11734304*alpha*m^3-1622340*m^3+2048*alpha^(11)*m^2+\
         11264*alpha^(10)*m^2+289792*alpha^9*m^2+1219584*alpha^8*m^2+5914752*alpha^7*m^2+15089088*alp\
         ha^6*m^2+12371840*alpha^5*m^2-4003744*alpha^4*m^2-19106720*alpha^3*m^2-17907952*alpha^2*m^2-\
         4858272*alpha*m^2+102600*m^2+24576*alpha^(10)*m+122880*alpha^9*m+1124352*alpha^8*m+3760128*a\
         lpha^7*m+4305408*alpha^6*m+271872*alpha^5*m-7811712*alpha^4*m-11935488*alpha^3*m-5078784*alp\
         ha^2*m+344448*alpha*m+496800*m+172800)/((2*alpha+m+1)*(2*alpha+2*m+-3)*(2*alpha+2*m+-1)*(2*a\
         lpha+2*m+1)*(2*alpha+2*m+3)*(2*alpha+2*m+5)*(m^2+2*alpha*m+m+2)*(m^2+2*alpha*m+m+4)*(m^2+2*a\
         lpha*m+m+6)*(m^2+2*alpha*m+m+8)*(m^2+2*alpha*m+m+10))",
    ),
];

/// Parsed catalog, built once.
pub struct FormulaCatalog {
    entries: HashMap<&'static str, PolyFraction>,
}

impl FormulaCatalog {
    pub fn global() -> &'static FormulaCatalog {
        static CAT: OnceLock<FormulaCatalog> = OnceLock::new();
        CAT.get_or_init(|| {
            let entries = CATALOG_SOURCES
                .iter()
                .map(|(k, s)| (*k, parse_polyfrac(s).unwrap_or_else(|e| panic!("catalog entry {k}: {e}"))))
                .collect();
            FormulaCatalog { entries }
        })
    }

    pub fn get(&self, name: &str) -> Option<&PolyFraction> {
        self.entries.get(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        CATALOG_SOURCES.iter().map(|(k, _)| *k)
    }
}

/// Evaluates a catalog entry at `params`, cancelling removable singularities.
///
/// `m` is substituted first, then `n` or `alpha`.
pub fn catalog_eval(name: &str, params: &EnsembleParams) -> Result<Rational, ClosedFormError> {
    let f = FormulaCatalog::global().get(name).ok_or_else(|| ClosedFormError::UnknownEntry(name.to_string()))?;
    let mut b: Vec<(&str, Rational)> = vec![("m", int(params.m as i64))];
    if f.vars().iter().any(|v| v == "n") {
        let n = params.implied_n().ok_or_else(|| RatError::Unbound("n".into()))?;
        b.push(("n", int(n as i64)));
    }
    b.push(("alpha", params.alpha.clone()));
    let used: Vec<(&str, Rational)> = b.into_iter().filter(|(v, _)| f.vars().iter().any(|x| x == v)).collect();
    Ok(polyfrac_eval(f, &used)?)
}

/// Which routes produced a [`MomentResult`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    /// Assembled only; no catalog entry was applicable at this point.
    Assembled,
    /// Assembled and confirmed equal to the named catalog entry.
    Catalog(&'static str),
}

/// An exact moment of the purity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MomentResult {
    pub k: u32,
    pub params: EnsembleParams,
    pub induced: Rational,
    pub purity: Rational,
    pub route: Route,
}

/// Moment matrices, traces and kernel integrals for one parameter point.
pub struct MomentEngine {
    pub params: EnsembleParams,
    pub tables: CoeffTables,
    order: u32,
    bilinear: OnceLock<BilinearContext>,
}

impl MomentEngine {
    /// Engine for all three moments.
    pub fn new(params: &EnsembleParams) -> Result<Self, ClosedFormError> {
        Self::for_order(params, 3)
    }

    /// Engine with tables just large enough for moments up to order `k`.
    pub fn for_order(params: &EnsembleParams, k: u32) -> Result<Self, ClosedFormError> {
        let tables = match k {
            1 | 2 => CoeffTables::new(params, params.m - 1, 2 * k as usize)?,
            _ => CoeffTables::for_moments(params)?,
        };
        Ok(MomentEngine { params: params.clone(), tables, order: k.max(1), bilinear: OnceLock::new() })
    }

    fn tr(&self, beta: usize, kind: MatrixKind) -> Rational {
        self.tables.moment_matrix(beta, kind).trace()
    }

    /// `tr M^(β) + tr M̂^(β)`.
    fn tr_both(&self, beta: usize) -> Rational {
        self.tr(beta, MatrixKind::Plain) + self.tr(beta, MatrixKind::Hatted)
    }

    pub fn bilinear(&self) -> &BilinearContext {
        self.bilinear.get_or_init(|| BilinearContext::new(&self.tables, 6))
    }

    /// `E_h[T]`.
    pub fn induced_t1(&self) -> Rational {
        self.tr_both(2) / int(2)
    }

    /// The two-point correction `½(tr M²M² + tr M̂²M̂²) + ∫∫x²y²K₀₀K₁₁` at powers `(β₁, β₂)`.
    fn two_point_pairs(&self, b1: usize, b2: usize) -> Result<Rational, ClosedFormError> {
        use MatrixKind::*;
        let pp = pair_trace(b1, b2, (Plain, Plain), &self.tables);
        let hh = pair_trace(b1, b2, (Hatted, Hatted), &self.tables);
        let g = g_cross(b1, b2, &self.params)? + g_cross(b2, b1, &self.params)?;
        Ok((pp + hh + g) / int(2))
    }

    /// `E_h[T²] = ½(tr M⁴ + tr M̂⁴) + E_h[T]² - 𝒥`.
    pub fn induced_t2(&self) -> Result<Rational, ClosedFormError> {
        let e = self.induced_t1();
        let j = self.two_point_pairs(2, 2)?;
        Ok(self.tr_both(4) / int(2) + &e * &e - j)
    }

    /// `m ∫ x⁶ h₁`.
    pub fn s1(&self) -> Rational {
        self.tr_both(6) / int(2)
    }

    /// `m(m-1) ∫∫ x⁴y² h₂`.
    pub fn s2(&self) -> Result<Rational, ClosedFormError> {
        let lead = self.tr_both(4) * self.tr_both(2) / int(4);
        Ok(lead - self.two_point_pairs(4, 2)?)
    }

    /// The four blocks of `m(m-1)(m-2) ∫∫∫ x²y²z² h₃`, in order A, B, C, D.
    pub fn s3_blocks(&self) -> Result<[Rational; 4], ClosedFormError> {
        let e = self.induced_t1();
        let a = &e * &e * &e;
        let b = -(int(3) * &e * self.two_point_pairs(2, 2)?);
        let c = c_block(self.bilinear()).map_err(ClosedFormError::Kernel)?;
        let d = d_block(&self.tables);
        Ok([a, b, c, d])
    }

    /// `E_h[T³] = S₁ + 3 S₂ + S₃`.
    pub fn induced_t3(&self) -> Result<Rational, ClosedFormError> {
        let s3: Rational = self.s3_blocks()?.into_iter().sum();
        Ok(self.s1() + int(3) * self.s2()? + s3)
    }

    pub fn induced(&self, k: u32) -> Result<Rational, ClosedFormError> {
        if k > self.order {
            return Err(ClosedFormError::Order(k));
        }
        match k {
            1 => Ok(self.induced_t1()),
            2 => self.induced_t2(),
            3 => self.induced_t3(),
            _ => Err(ClosedFormError::Order(k)),
        }
    }
}

/// `E_h[T]` from the moment matrices.
pub fn induced_t1(params: &EnsembleParams) -> Result<Rational, ClosedFormError> {
    Ok(MomentEngine::for_order(params, 1)?.induced_t1())
}

/// `E_h[T²]` from the moment matrices and the reduced `K₀₀K₁₁` sum.
pub fn induced_t2(params: &EnsembleParams) -> Result<Rational, ClosedFormError> {
    MomentEngine::for_order(params, 2)?.induced_t2()
}

/// `E_h[T³]`, cross-checked against the printed third moment at physical `α`.
pub fn induced_t3(params: &EnsembleParams) -> Result<Rational, ClosedFormError> {
    let v = MomentEngine::new(params)?.induced_t3()?;
    if params.is_physical() {
        let purity = &v / rising_factorial(&params.d, 6)?;
        let cat = catalog_eval("mP3", params)?;
        if cat != purity {
            return Err(ClosedFormError::Consistency { entry: "mP3", assembled: purity, catalog: cat });
        }
    }
    Ok(v)
}

/// Catalog entry that states `E_f[P^k]` directly at these parameters.
fn catalog_for(k: u32, params: &EnsembleParams) -> (&'static str, bool) {
    match (k, params.is_physical()) {
        (1, true) => ("mP1", true),
        (2, true) => ("mP2", true),
        (3, true) => ("mP3", true),
        (1, false) => ("mP1_alpha", true),
        (2, false) => ("EhT2", false),
        _ => ("Pmoment3_alpha", true),
    }
}

/// `E_f[P^k]` for `k ∈ {1,2,3}`, assembled and confirmed against the catalog.
pub fn purity_moment(k: u32, params: &EnsembleParams) -> Result<MomentResult, ClosedFormError> {
    let engine = MomentEngine::for_order(params, k)?;
    purity_moment_with(k, &engine)
}

/// [`purity_moment`] reusing an existing engine.
pub fn purity_moment_with(k: u32, engine: &MomentEngine) -> Result<MomentResult, ClosedFormError> {
    let params = &engine.params;
    let induced = engine.induced(k)?;
    let purity = &induced / rising_factorial(&params.d, 2 * k as i64)?;
    let (entry, is_purity) = catalog_for(k, params);
    let route = match catalog_eval(entry, params) {
        Ok(v) => {
            let mine = if is_purity { &purity } else { &induced };
            if &v != mine {
                return Err(ClosedFormError::Consistency { entry, assembled: mine.clone(), catalog: v });
            }
            Route::Catalog(entry)
        }
        // Non-physical α can hit a pole of the α-form's printed denominator.
        Err(ClosedFormError::Rat(RatError::TruePole(_))) if !params.is_physical() => Route::Assembled,
        Err(e) => return Err(e),
    };
    Ok(MomentResult { k, params: params.clone(), induced, purity, route })
}

/// The normalization `c` of the ordered-simplex density and `c' = c Γ(d)`.
///
/// Needs `2α` to be an integer so that every gamma factor is rational times a
/// power of `√π`.
pub fn const_c(params: &EnsembleParams) -> Result<(PiRational, PiRational), ClosedFormError> {
    let a = &params.alpha;
    let two_a = a * int(2);
    if !two_a.is_integer() {
        return Err(RatError::Unpairable(format!("alpha = {a} is neither integer nor half-integer")).into());
    }
    let m = params.m as i64;
    let exp = -(int(m) * (int(m) + &two_a)).to_integer();
    let exp: i64 = exp.try_into().map_err(|_| RatError::Pole("exponent overflow".into()))?;
    let two_pow = if exp >= 0 { int(2).pow(exp as i32) } else { rat(1, 1) / int(2).pow((-exp) as i32) };
    let mut cp = PiRational { coeff: two_pow, half_pi_power: m as i32 };
    for i in 1..=m {
        let i_ = int(i);
        cp = cp.mul(&gamma_half_integer(&(&i_ + int(1)))?);
        cp = cp.mul(&gamma_half_integer(&(&i_ + &two_a + int(1)))?);
        cp = cp.div(&gamma_half_integer(&(&i_ + a + rat(1, 2)))?);
    }
    let c = cp.div(&gamma_half_integer(&params.d)?);
    Ok((c, cp))
}
