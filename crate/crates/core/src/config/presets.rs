//! Benchmark presets: complete, diffable run configurations for the
//! published cases the solver reproduces.

use crate::{Error, Result};

pub const PRESET_NAMES: &[&str] = &[
    "sofronis1989",
    "krom1999",
    "krom1999-fast",
    "dadfarnia2011-multitrap",
    "dadfarnia2014-dislocations",
    "mcnabb-paneda2020",
    "charles2021",
    "dileo-anand",
    "her-generalized-flux",
    "kotake-softening",
    "legrand-tds",
    "two-trap-tds",
];

pub fn preset(name: &str) -> Result<&'static str> {
    match name {
        "sofronis1989" => Ok(SOFRONIS_1989),
        "krom1999" => Ok(KROM_1999),
        "krom1999-fast" => Ok(KROM_1999_FAST),
        "dadfarnia2011-multitrap" => Ok(DADFARNIA_2011),
        "dadfarnia2014-dislocations" => Ok(DADFARNIA_2014),
        "mcnabb-paneda2020" => Ok(MCNABB_PANEDA_2020),
        "charles2021" => Ok(CHARLES_2021),
        "dileo-anand" => Ok(DILEO_ANAND),
        "her-generalized-flux" => Ok(HER_GENERALIZED),
        "kotake-softening" => Ok(KOTAKE_SOFTENING),
        "legrand-tds" => Ok(LEGRAND_TDS),
        "two-trap-tds" => Ok(TWO_TRAP_TDS),
        other => Err(Error::Config(vec![format!(
            "unknown preset `{other}` (available: {})",
            PRESET_NAMES.join(", ")
        )])),
    }
}

/// Iron-like crack-tip uptake with one dislocation trap family, constant
/// surface concentration, no trap-creation term.
const SOFRONIS_1989: &str = r#"
name = "sofronis1989"

[geometry]
kind = "boundary-layer"
outer_radius = "0.15 m"
tip_opening = "10 um"
refinement = 1

[material]
E = "207 GPa"
nu = 0.3
sigma_y0 = "250 MPa"
hardening_exponent = 0.2
displacement_order = 2

[lattice]
D_L = "1.27e-8 m^2/s"
V_H = "2e-6 m^3/mol"
N_L = "5.1e29 sites/m^3"
T = "300 K"

[[trap]]
label = "dislocations"
kinetics = "oriani"
E_B = "60 kJ/mol"
density = "kumnick"

[transport]
formulation = "cl"
concentration_order = 1
initial = "1.0 * C_env"
krom = false

[loading]
K_I = "89.7 MPa*m^0.5"
t_load = "130 s"
t_end = "130 s"
stress_source = "fe"

[[boundary]]
tag = "crack-tip"
kind = "dirichlet"
C_env = "2.084e21 atoms/m^3"

[[boundary]]
tag = "crack-wall"
kind = "dirichlet"
C_env = "2.084e21 atoms/m^3"

[[boundary]]
tag = "symmetry"
kind = "insulated"

[[boundary]]
tag = "remote"
kind = "insulated"

[solver]
bdf_order = 2
rel_tol = 1e-4
dt_init = "1e-2 s"
dt_min = "1e-9 s"
dt_max = "10 s"

[output]
times = ["130 s"]

[[output.linecut]]
kind = "crack-plane"
samples = 300
"#;

/// Same problem with the trap-creation (strain-rate) sink enabled.
const KROM_1999: &str = r#"
name = "krom1999"

[geometry]
kind = "boundary-layer"
outer_radius = "0.15 m"
tip_opening = "10 um"
refinement = 1

[material]
E = "207 GPa"
nu = 0.3
sigma_y0 = "250 MPa"
hardening_exponent = 0.2
displacement_order = 2

[lattice]
D_L = "1.27e-8 m^2/s"
V_H = "2e-6 m^3/mol"
N_L = "5.1e29 sites/m^3"
T = "300 K"

[[trap]]
label = "dislocations"
kinetics = "oriani"
E_B = "60 kJ/mol"
density = "kumnick"

[transport]
formulation = "cl"
concentration_order = 1
initial = "1.0 * C_env"
krom = true

[loading]
K_I = "89.7 MPa*m^0.5"
t_load = "130 s"
t_end = "130 s"
stress_source = "fe"

[[boundary]]
tag = "crack-tip"
kind = "dirichlet"
C_env = "2.084e21 atoms/m^3"

[[boundary]]
tag = "crack-wall"
kind = "dirichlet"
C_env = "2.084e21 atoms/m^3"

[[boundary]]
tag = "symmetry"
kind = "insulated"

[[boundary]]
tag = "remote"
kind = "insulated"

[solver]
bdf_order = 2
rel_tol = 1e-4
dt_init = "1e-2 s"
dt_min = "1e-9 s"
dt_max = "10 s"

[output]
times = ["130 s"]

[[output.linecut]]
kind = "crack-plane"
samples = 300
"#;

/// Fast loading (1.3 s): lattice depletion by trap creation.
const KROM_1999_FAST: &str = r#"
name = "krom1999-fast"

[geometry]
kind = "boundary-layer"
outer_radius = "0.15 m"
tip_opening = "10 um"
refinement = 1

[material]
E = "207 GPa"
nu = 0.3
sigma_y0 = "250 MPa"
hardening_exponent = 0.2
displacement_order = 2

[lattice]
D_L = "1.27e-8 m^2/s"
V_H = "2e-6 m^3/mol"
N_L = "5.1e29 sites/m^3"
T = "300 K"

[[trap]]
label = "dislocations"
kinetics = "oriani"
E_B = "60 kJ/mol"
density = "kumnick"

[transport]
formulation = "cl"
concentration_order = 1
initial = "1.0 * C_env"
krom = true

[loading]
K_I = "89.7 MPa*m^0.5"
t_load = "1.3 s"
t_end = "1.3 s"
stress_source = "fe"

[[boundary]]
tag = "crack-tip"
kind = "dirichlet"
C_env = "2.084e21 atoms/m^3"

[[boundary]]
tag = "crack-wall"
kind = "dirichlet"
C_env = "2.084e21 atoms/m^3"

[[boundary]]
tag = "symmetry"
kind = "insulated"

[[boundary]]
tag = "remote"
kind = "insulated"

[solver]
bdf_order = 2
rel_tol = 1e-4
dt_init = "1e-4 s"
dt_min = "1e-12 s"
dt_max = "0.2 s"

[output]
times = ["1.3 s"]

[[output.linecut]]
kind = "crack-plane"
samples = 300
"#;

/// Three trap families (carbides, dislocations, grain boundaries) with a
/// Sieverts pressure-ramp boundary and an initially hydrogen-free bulk.
const DADFARNIA_2011: &str = r#"
name = "dadfarnia2011-multitrap"

[geometry]
kind = "boundary-layer"
outer_radius = "0.15 m"
tip_opening = "10 um"
refinement = 1

[material]
E = "201.88 GPa"
nu = 0.3
sigma_y0 = "595 MPa"
hardening_exponent = 0.059
displacement_order = 2

[lattice]
D_L = "1.27e-8 m^2/s"
V_H = "2e-6 m^3/mol"
N_L = "8.46e28 sites/m^3"
T = "300 K"

[[trap]]
label = "carbides"
kinetics = "oriani"
E_B = "11.5 kJ/mol"
density = "constant"
N_T = "8.46e26 sites/m^3"

[[trap]]
label = "dislocations"
kinetics = "oriani"
E_B = "20.2 kJ/mol"
density = "dislocation"
rho0 = "1e10 1/m^2"
gamma_disl = "1e16 1/m^2"
lattice_param = "0.287 nm"

[[trap]]
label = "grain-boundaries"
kinetics = "oriani"
E_B = "58.6 kJ/mol"
density = "constant"
N_T = "8.46e22 sites/m^3"

[transport]
formulation = "cl"
concentration_order = 1
initial = "1e-4 * C_env"
clamp = true
krom = true

[loading]
K_I = "89.7 MPa*m^0.5"
t_load = "130 s"
t_end = "130 s"
stress_source = "fe"

[[boundary]]
tag = "crack-tip"
kind = "dirichlet"
C_env = "2.66e22 atoms/m^3"
ramp = "sqrt"
t_load = "130 s"

[[boundary]]
tag = "crack-wall"
kind = "dirichlet"
C_env = "2.66e22 atoms/m^3"
ramp = "sqrt"
t_load = "130 s"

[[boundary]]
tag = "symmetry"
kind = "insulated"

[[boundary]]
tag = "remote"
kind = "insulated"

[solver]
bdf_order = 2
rel_tol = 1e-4
dt_init = "1e-3 s"
dt_min = "1e-10 s"
dt_max = "5 s"

[output]
times = ["130 s"]

[[output.linecut]]
kind = "crack-plane"
samples = 300
"#;

/// Pipeline-steel parameters with hydrogen riding on mobile dislocations
/// (convective transport along the crack plane).
const DADFARNIA_2014: &str = r#"
name = "dadfarnia2014-dislocations"

[geometry]
kind = "boundary-layer"
outer_radius = "0.15 m"
tip_opening = "10 um"
refinement = 1

[material]
E = "200 GPa"
nu = 0.3
sigma_y0 = "600 MPa"
hardening_exponent = 0.06
displacement_order = 2

[lattice]
D_L = "2e-8 m^2/s"
V_H = "2e-6 m^3/mol"
N_L = "8.46e28 sites/m^3"
T = "300 K"

[[trap]]
label = "mobile-dislocations"
kinetics = "oriani"
E_B = "50 kJ/mol"
density = "kumnick"
multiplicity = 10
mobile = true

[transport]
formulation = "cl"
concentration_order = 1
initial = "1.0 * C_env"
krom = true

[transport.dislocation_flux]
gamma = "bcc"
burgers = "0.248 nm"
lattice_param = "0.287 nm"
n_d = 1.0
direction = [1.0, 0.0]

[loading]
K_I = "100 MPa*m^0.5"
t_load = "10000 s"
t_end = "10000 s"
stress_source = "fe"

[[boundary]]
tag = "crack-tip"
kind = "dirichlet"
C_env = "2.08e21 atoms/m^3"

[[boundary]]
tag = "crack-wall"
kind = "dirichlet"
C_env = "2.08e21 atoms/m^3"

[[boundary]]
tag = "symmetry"
kind = "insulated"

[[boundary]]
tag = "remote"
kind = "insulated"

[solver]
bdf_order = 2
rel_tol = 1e-4
dt_init = "1 s"
dt_min = "1e-8 s"
dt_max = "500 s"

[output]
times = ["10000 s"]

[[output.linecut]]
kind = "crack-plane"
samples = 300
"#;

/// Kinetic trapping (occupancy arrangement) with empty initial traps.
const MCNABB_PANEDA_2020: &str = r#"
name = "mcnabb-paneda2020"

[geometry]
kind = "boundary-layer"
outer_radius = "0.15 m"
tip_opening = "10 um"
refinement = 1

[material]
E = "207 GPa"
nu = 0.3
sigma_y0 = "250 MPa"
hardening_exponent = 0.2
displacement_order = 2

[lattice]
D_L = "1.27e-8 m^2/s"
V_H = "2e-6 m^3/mol"
N_L = "5.1e29 sites/m^3"
T = "300 K"

[[trap]]
label = "dislocations"
kinetics = "mcnabb-foster"
kappa0 = "1.68e8 1/s"
E_B = "60 kJ/mol"
option = 1
density = "kumnick"

[transport]
formulation = "cl"
concentration_order = 1
initial = "1.0 * C_env"
traps_in_equilibrium = false
krom = true
option1_strain_term = true

[loading]
K_I = "89.7 MPa*m^0.5"
t_load = "130 s"
t_end = "130 s"
stress_source = "fe"

[[boundary]]
tag = "crack-tip"
kind = "dirichlet"
C_env = "2.084e21 atoms/m^3"

[[boundary]]
tag = "crack-wall"
kind = "dirichlet"
C_env = "2.084e21 atoms/m^3"

[[boundary]]
tag = "symmetry"
kind = "insulated"

[[boundary]]
tag = "remote"
kind = "insulated"

[solver]
bdf_order = 2
rel_tol = 1e-4
dt_init = "1e-2 s"
dt_min = "1e-9 s"
dt_max = "10 s"

[output]
times = ["130 s"]

[[output.linecut]]
kind = "crack-plane"
samples = 300
"#;

/// Kinetic trapping through the trapped-concentration arrangement; the
/// capture frequency follows from the release constant and binding energy.
const CHARLES_2021: &str = r#"
name = "charles2021"

[geometry]
kind = "boundary-layer"
outer_radius = "0.15 m"
tip_opening = "10 um"
refinement = 1

[material]
E = "207 GPa"
nu = 0.3
sigma_y0 = "250 MPa"
hardening_exponent = 0.2
displacement_order = 2

[lattice]
D_L = "1.27e-8 m^2/s"
V_H = "2e-6 m^3/mol"
N_L = "5.1e29 sites/m^3"
T = "300 K"

[[trap]]
label = "dislocations"
kinetics = "mcnabb-foster"
kappa0 = "2.7972e8 1/s"
lambda0 = "1e-2 1/s"
option = 2
density = "kumnick"

[transport]
formulation = "cl"
concentration_order = 1
initial = "1.0 * C_env"
traps_in_equilibrium = true
krom = true

[loading]
K_I = "89.7 MPa*m^0.5"
t_load = "130 s"
t_end = "130 s"
stress_source = "fe"

[[boundary]]
tag = "crack-tip"
kind = "dirichlet"
C_env = "2.084e21 atoms/m^3"

[[boundary]]
tag = "crack-wall"
kind = "dirichlet"
C_env = "2.084e21 atoms/m^3"

[[boundary]]
tag = "symmetry"
kind = "insulated"

[[boundary]]
tag = "remote"
kind = "insulated"

[solver]
bdf_order = 2
rel_tol = 1e-4
dt_init = "1e-2 s"
dt_min = "1e-9 s"
dt_max = "10 s"

[output]
times = ["130 s"]

[[output.linecut]]
kind = "crack-plane"
samples = 300
"#;

/// Stress-dependent uptake: concentration form with the exponential surface
/// factor (switch `formulation` to "mu" for the potential-based run).
const DILEO_ANAND: &str = r#"
name = "dileo-anand"

[geometry]
kind = "boundary-layer"
outer_radius = "0.15 m"
tip_opening = "10 um"
refinement = 1

[material]
E = "207 GPa"
nu = 0.3
sigma_y0 = "250 MPa"
hardening_exponent = 0.2
displacement_order = 2

[lattice]
D_L = "1.27e-8 m^2/s"
V_H = "2e-6 m^3/mol"
N_L = "5.1e29 sites/m^3"
T = "300 K"

[[trap]]
label = "dislocations"
kinetics = "oriani"
E_B = "60 kJ/mol"
density = "kumnick"

[transport]
formulation = "cl"
concentration_order = 1
initial = "1.0 * C_env"
krom = true

[loading]
K_I = "89.7 MPa*m^0.5"
t_load = "130 s"
t_end = "130 s"
stress_source = "fe"

[[boundary]]
tag = "crack-tip"
kind = "dirichlet"
C_env = "2.084e21 atoms/m^3"
stress_dependent = true

[[boundary]]
tag = "crack-wall"
kind = "dirichlet"
C_env = "2.084e21 atoms/m^3"
stress_dependent = true

[[boundary]]
tag = "symmetry"
kind = "insulated"

[[boundary]]
tag = "remote"
kind = "insulated"

[solver]
bdf_order = 2
rel_tol = 1e-4
dt_init = "1e-2 s"
dt_min = "1e-9 s"
dt_max = "10 s"

[output]
times = ["130 s"]

[[output.linecut]]
kind = "crack-plane"
samples = 300
"#;

/// Electrochemical charging through the generalised HER flux on the crack
/// surfaces (wall and tip constants differ).
const HER_GENERALIZED: &str = r#"
name = "her-generalized-flux"

[geometry]
kind = "boundary-layer"
outer_radius = "0.15 m"
tip_opening = "10 um"
refinement = 1

[material]
E = "207 GPa"
nu = 0.3
sigma_y0 = "250 MPa"
hardening_exponent = 0.2
displacement_order = 2

[lattice]
D_L = "1.27e-8 m^2/s"
V_H = "2e-6 m^3/mol"
N_L = "5.1e29 sites/m^3"
T = "300 K"

[[trap]]
label = "dislocations"
kinetics = "mcnabb-foster"
kappa0 = "1.68e8 1/s"
E_B = "60 kJ/mol"
option = 1
density = "kumnick"

[transport]
formulation = "cl"
concentration_order = 1
initial = "1e-4 * C_env"
traps_in_equilibrium = false
krom = true

[loading]
K_I = "89.7 MPa*m^0.5"
t_load = "130 s"
t_end = "130 s"
stress_source = "fe"

[[boundary]]
tag = "crack-tip"
kind = "her"
k_abs = "1.18e5 m/s"
k_des = "8.9e9 m/s"
k_c = "5e-6 mol/m^2/s"
k_r_chem = "22 mol/m^2/s"

[[boundary]]
tag = "crack-wall"
kind = "her"
k_abs = "1.18e5 m/s"
k_des = "8.8e9 m/s"
k_c = "5e-7 mol/m^2/s"
k_r_chem = "22 mol/m^2/s"

[[boundary]]
tag = "symmetry"
kind = "insulated"

[[boundary]]
tag = "remote"
kind = "insulated"

[solver]
bdf_order = 2
rel_tol = 1e-4
dt_init = "1e-2 s"
dt_min = "1e-9 s"
dt_max = "10 s"

[output]
times = ["130 s"]

[[output.linecut]]
kind = "crack-plane"
samples = 300
"#;

/// Hydrogen-induced softening with insulated crack surfaces; the softening
/// coefficient follows the xi convention (negative = softening).
const KOTAKE_SOFTENING: &str = r#"
name = "kotake-softening"

[geometry]
kind = "boundary-layer"
outer_radius = "0.15 m"
tip_opening = "10 um"
refinement = 1

[material]
E = "207 GPa"
nu = 0.3
sigma_y0 = "250 MPa"
hardening_exponent = 0.2
softening_xi = -5000.0
displacement_order = 2

[lattice]
D_L = "1.27e-8 m^2/s"
V_H = "2e-6 m^3/mol"
N_L = "5.1e29 sites/m^3"
T = "300 K"

[[trap]]
label = "dislocations"
kinetics = "oriani"
E_B = "60 kJ/mol"
density = "kumnick"

[transport]
formulation = "cl"
concentration_order = 1
initial = "2.084e21 atoms/m^3"
krom = true

[loading]
K_I = "40 MPa*m^0.5"
t_load = "100 s"
t_end = "100 s"
stress_source = "fe"

[[boundary]]
tag = "crack-tip"
kind = "insulated"

[[boundary]]
tag = "crack-wall"
kind = "insulated"

[[boundary]]
tag = "symmetry"
kind = "insulated"

[[boundary]]
tag = "remote"
kind = "insulated"

[solver]
bdf_order = 2
rel_tol = 1e-4
dt_init = "1e-2 s"
dt_min = "1e-9 s"
dt_max = "5 s"
coupling = "staggered-multi"
multipass_tol = 1e-4
max_passes = 10

[output]
times = ["100 s"]

[[output.linecut]]
kind = "crack-plane"
samples = 300
"#;

/// Slab thermal desorption with one strong kinetic trap.
const LEGRAND_TDS: &str = r#"
name = "legrand-tds"

[geometry]
kind = "interval"
length = "2 mm"
elements = 1000
grading = 0.02

[lattice]
D_L = "2.74e-6 m^2/s"
V_H = "0 m^3/mol"
N_L = "2.1e5 mol/m^3"
T = "10 K"

[[trap]]
label = "trap-1"
kinetics = "mcnabb-foster"
kappa0 = "1e13 1/s"
lambda0 = "1e8 1/s"
E_t = "0.2 eV"
E_d = "0.6 eV"
option = 2
density = "constant"
N_T = "2 mol/m^3"

[transport]
formulation = "cl"
concentration_order = 2
initial = "1.0 mol/m^3"
traps_in_equilibrium = true
clamp = false
krom = false

[solver]
bdf_order = 2
rel_tol = 1e-4
dt_init = "1e-2 s"
dt_min = "1e-10 s"
dt_max = "10 s"

[output]

[tds]
T0 = "10 K"
phi = "50 K/min"
T_end = "800 K"
sample = "1 K"
D_L0 = "2.74e-6 m^2/s"
E_L = "0.2 eV"
C_L0 = "1.0 mol/m^3"
"#;

/// Two kinetic traps of equal density; the weaker trap empties first.
const TWO_TRAP_TDS: &str = r#"
name = "two-trap-tds"

[geometry]
kind = "interval"
length = "2 mm"
elements = 1000
grading = 0.02

[lattice]
D_L = "2.74e-6 m^2/s"
V_H = "0 m^3/mol"
N_L = "2.1e5 mol/m^3"
T = "10 K"

[[trap]]
label = "trap-1"
kinetics = "mcnabb-foster"
kappa0 = "1e13 1/s"
lambda0 = "1e8 1/s"
E_t = "0.2 eV"
E_d = "0.6 eV"
option = 2
density = "constant"
N_T = "2 mol/m^3"

[[trap]]
label = "trap-2"
kinetics = "mcnabb-foster"
kappa0 = "1e13 1/s"
lambda0 = "1e8 1/s"
E_t = "0.2 eV"
E_d = "0.4 eV"
option = 2
density = "constant"
N_T = "2 mol/m^3"

[transport]
formulation = "cl"
concentration_order = 2
initial = "1.0 mol/m^3"
traps_in_equilibrium = true
clamp = false
krom = false

[solver]
bdf_order = 2
rel_tol = 1e-4
dt_init = "1e-2 s"
dt_min = "1e-10 s"
dt_max = "10 s"

[output]

[tds]
T0 = "10 K"
phi = "50 K/min"
T_end = "800 K"
sample = "1 K"
D_L0 = "2.74e-6 m^2/s"
E_L = "0.2 eV"
C_L0 = "1.0 mol/m^3"
"#;
