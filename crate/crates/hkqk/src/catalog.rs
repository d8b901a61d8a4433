//! Static table of every check the pipeline can report, in report order.

pub struct CheckInfo {
    pub name: &'static str,
    pub anchor: &'static str,
}

const fn c(name: &'static str, anchor: &'static str) -> CheckInfo {
    CheckInfo { name, anchor }
}

pub const CHECKS: &[CheckInfo] = &[
    c("chart_consistency", "plumbing: d^2 = 0 on declared structure equations"),
    c("hk_quaternion_relations", "hyperKahler: I^2 = J^2 = K^2 = -1, IJ = K = -JI"),
    c("hk_hermitian", "hyperKahler: g(A., A.) = g for A = I, J, K"),
    c("hk_kahler_forms", "hyperKahler: omega_A = g(A., .)"),
    c("hk_closed", "hyperKahler: d omega_I = d omega_J = d omega_K = 0"),
    c("rotating_isometry", "rotating symmetry: L_X g = 0"),
    c("rotating_omega_I", "rotating symmetry: L_X omega_I = 0"),
    c("rotating_omega_J", "rotating symmetry: L_X omega_J = omega_K"),
    c("rotating_omega_K", "rotating symmetry: L_X omega_K = -omega_J"),
    c("rotating_nonnull", "rotating symmetry: g(X, X) not identically zero"),
    c("symmetry_d_alpha_I", "derived forms: d alpha_I = 0"),
    c("symmetry_d_alpha_J", "derived forms: d alpha_J = omega_K"),
    c("symmetry_d_alpha_K", "derived forms: d alpha_K = -omega_J"),
    c("symmetry_d_alpha_0", "derived forms: d alpha_0 = G - omega_I"),
    c("moment_map", "derived forms: d mu = alpha_I"),
    c("moment_map_invariant", "derived forms: X(mu) = 0"),
    c("G_type_11", "derived forms: G of type (1,1) for I, J and K"),
    c("g_alpha_rank", "derived forms: g_alpha = sum of squares of alpha_0..alpha_K has rank 4"),
    c("four_form_closed", "fundamental four-form: d Omega = 0"),
    c("four_form_invariant", "fundamental four-form: L_X Omega = 0"),
    c("twist_F_closed", "twist data: dF = 0"),
    c("twist_F_invariant", "twist data: L_X F = 0"),
    c("twist_hamiltonian", "twist data: da = -X -| F"),
    c("twist_nonzero", "twist data: a not identically zero"),
    c("twist_integral_periods", "twist data: F has integral periods (not checkable on one chart)"),
    c("twist_smooth_quotient", "twist data: lambda_i and c integers, pairwise coprime"),
    c("twisted_integrability", "twisted complex structure integrable iff F of type (1,1)"),
    c("twisted_derivative", "d_W alpha = d alpha - (1/a) F ^ (X -| alpha); d_W^2 = 0 on invariant forms"),
    c("principal_extension_exact", "principal extension: d beta = F"),
    c("principal_extension_consistency", "principal extension: d^2 = 0 with d theta = F, d tau = theta - beta"),
    c("principal_lift", "principal extension: theta(X') = a with X' = X + c d/dtau"),
    c("principal_descent", "principal extension: d of a basic lift equals d_W on the base"),
    c("bridge_beta", "flat model: beta(X) = g(X, X) - mu"),
    c("thm_canonical_spec", "canonical deformation: f = -1/(mu - c), h = 1/(mu - c)^2 = f'"),
    c("thm_canonical_twist", "canonical twist data: F = kG, a = k(g(X, X) - mu + c), da = -X -| F"),
    c("omegaN_invariant", "deformed four-form: L_X Omega^N = 0"),
    c("thm_canonical_gN", "canonical g^N twists to quaternionic Kahler: d_W Omega^N = 0"),
    c("qk_certificate", "quaternionic Kahler criterion: dim >= 12 closure suffices, dim 8 needs a connection"),
    c("qk_connection_dim8", "dim 8: d_W omega^N = A ^ omega^N with A so(3)-valued"),
    c("signature_trichotomy", "quaternionic signature of g^N in {(p+1,q-1), (p,q), (p-1,q+1)}"),
    c("degeneracy_labels", "degeneracy loci: g(X,X) = 0, g(X,X) - mu + c = 0, mu = c"),
    c("falsify_f_only", "uniqueness: spec (f, 0) is not quaternionic Kahler after twisting"),
    c("falsify_unit_f", "uniqueness: spec (1, h) is not quaternionic Kahler after twisting"),
    c("falsify_undeformed", "uniqueness: spec (1, 0) with F != 0 is not quaternionic Kahler after twisting"),
    c("cone_chart_consistency", "cone over RH(2): d^2 = 0 with da = 0, db = -lambda a^b, dphi = 2 a^b"),
    c("cone_lambda_reduction", "cone over RH(2): rescaled coframe depends on lambda only through lambda^2"),
    c("cone_kahler_closed", "cone over RH(2): d omega_C = 0"),
    c("cone_signature", "cone over RH(2): g_C has signature (2,2)"),
    c("special_connection", "special Kahler connection exists iff lambda^2 in {4, 4/3}"),
    c("special_connection_levi_civita", "special connection equals Levi-Civita iff lambda^2 = 4"),
    c("special_connection_flat", "special connection: curvature, torsion, symplectic and d^nabla I residuals vanish"),
    c("cmap_fiber_consistency", "rigid c-map: d^2 = 0 on T*C with fiber equations from the flat connection"),
    c("cmap_twist_k", "rigid c-map: F = kG determines k"),
    c("cmap_twist_function", "rigid c-map: a = -t^2/2 + c"),
    c("cmap_basic_coframe", "c-map twist: rotated coframe elements are basic"),
    c("cmap_unrotated_not_basic", "c-map twist: unrotated fiber forms are not basic"),
    c("cmap_structure_constants", "c-map twist: structure functions are constants"),
    c("cmap_jacobi", "c-map twist: Jacobi identity for the structure constants"),
    c("cmap_reference", "c-map twist: structure constants match the stored reference"),
    c("cmap_gN_constant", "c-map twist: g^N has constant coefficients"),
    c("cmap_gN_definite", "c-map twist: g^N is positive definite"),
    c("cmap_qk_connection", "c-map twist: dim 8 connection system solvable"),
];

/// Anchor text for a check; names of the form `base[detail]` use the anchor of `base`.
pub fn anchor(name: &str) -> &'static str {
    let base = name.split('[').next().unwrap_or(name);
    CHECKS.iter().find(|c| c.name == base).map(|c| c.anchor).unwrap_or("plumbing")
}

/// Position of a check in the static table, used to order reports.
pub fn order(name: &str) -> usize {
    let base = name.split('[').next().unwrap_or(name);
    CHECKS.iter().position(|c| c.name == base).unwrap_or(CHECKS.len())
}

pub fn list() -> String {
    let width = CHECKS.iter().map(|c| c.name.len()).max().unwrap_or(0);
    CHECKS.iter().map(|c| format!("{:width$}  {}\n", c.name, c.anchor)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_are_unique_and_anchored() {
        let mut names: Vec<_> = CHECKS.iter().map(|c| c.name).collect();
        names.sort();
        names.dedup();
        assert_eq!(names.len(), CHECKS.len());
        assert_eq!(anchor("hk_closed[omega_J]"), anchor("hk_closed"));
        assert_eq!(anchor("no_such_check"), "plumbing");
        assert!(list().contains("thm_canonical_gN"));
    }
}
