/// Numerical tolerances shared across the library.
///
/// Free functions use [`Tolerances::DEFAULT`]; the `*_with` variants and the
/// solver parameter structs accept an explicit set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Relative Hermiticity defect accepted before symmetrizing.
    pub herm_tol: f64,
    /// Most negative eigenvalue tolerated by PSD functions.
    pub psd_tol: f64,
    /// Relative singular-value cutoff for partial isometries.
    pub rank_tol: f64,
    pub eig_tol: f64,
    /// Minimum distance of a ball point from the unit sphere.
    pub boundary_tol: f64,
    /// Allowed defect of T*JT - J for automorphism blocks.
    pub aut_tol: f64,
    /// Allowed deviation of a geodesic direction from unit norm.
    pub dir_tol: f64,
    pub cond_tol: f64,
    pub group_tol: f64,
    pub fp_tol: f64,
    pub cheb_tol: f64,
    pub elliptic_margin: f64,
    pub rep_tol: f64,
    pub unit_tol: f64,
    pub split_tol: f64,
    pub diam_tol: f64,
    /// Largest principal-angle sine accepted for subspace invariance.
    pub pair_tol: f64,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        herm_tol: 1e-10,
        psd_tol: 1e-10,
        rank_tol: 1e-12,
        eig_tol: 1e-9,
        boundary_tol: 1e-8,
        aut_tol: 1e-8,
        dir_tol: 1e-9,
        cond_tol: 1e12,
        group_tol: 1e-7,
        fp_tol: 1e-9,
        cheb_tol: 1e-9,
        elliptic_margin: 1e-6,
        rep_tol: 1e-8,
        unit_tol: 1e-7,
        split_tol: 1e-10,
        diam_tol: 1e-9,
        pair_tol: 1e-8,
    };

    /// Returns the name of the first non-positive tolerance, if any.
    pub fn first_invalid(&self) -> Option<&'static str> {
        let named = [
            ("herm_tol", self.herm_tol),
            ("psd_tol", self.psd_tol),
            ("rank_tol", self.rank_tol),
            ("eig_tol", self.eig_tol),
            ("boundary_tol", self.boundary_tol),
            ("aut_tol", self.aut_tol),
            ("dir_tol", self.dir_tol),
            ("cond_tol", self.cond_tol),
            ("group_tol", self.group_tol),
            ("fp_tol", self.fp_tol),
            ("cheb_tol", self.cheb_tol),
            ("elliptic_margin", self.elliptic_margin),
            ("rep_tol", self.rep_tol),
            ("unit_tol", self.unit_tol),
            ("split_tol", self.split_tol),
            ("diam_tol", self.diam_tol),
            ("pair_tol", self.pair_tol),
        ];
        named
            .iter()
            .find(|(_, v)| !(*v > 0.0) || !v.is_finite())
            .map(|(n, _)| *n)
    }
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}
