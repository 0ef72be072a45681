//! Named figure recipes.

/// A shipped configuration.
#[derive(Debug, Clone, Copy)]
pub struct Preset {
    pub name: &'static str,
    pub description: &'static str,
    pub text: &'static str,
}

macro_rules! preset {
    ($name:literal, $desc:literal, $text:expr) => {
        Preset {
            name: $name,
            description: $desc,
            text: $text,
        }
    };
}

pub const PRESETS: &[Preset] = &[
    preset!(
        "fig1a",
        "dephasing QSL ratio vs t at strong coupling for several temperatures",
        "[dephasing-qsl]\nlambda = 0.2\n[sweep]\nt = 0:3:16\ntemperature = 0.5, 1, 2, 5\n"
    ),
    preset!(
        "fig1a-inset",
        "dephasing QSL ratio vs temperature at t = 0.3, strong coupling",
        "[dephasing-qsl]\nlambda = 0.2\nt = 0.3\n[sweep]\ntemperature = 0.1:5:11\n"
    ),
    preset!(
        "fig1b",
        "dephasing QSL ratio vs t at weak coupling for several temperatures",
        "[dephasing-qsl]\nlambda = 0.001\n[sweep]\nt = 0:3:16\ntemperature = 0.1, 1, 5\n"
    ),
    preset!(
        "fig1b-inset",
        "dephasing QSL ratio vs temperature at t = 0.5 and t = 3, weak coupling",
        "[dephasing-qsl]\nlambda = 0.001\n[sweep]\nt = 0.5, 3\ntemperature = 0.1:5:11\n"
    ),
    preset!(
        "fig2a",
        "QSL-to-coherence ratio vs t at strong coupling",
        "[dephasing-ratio]\nlambda = 0.2\n[sweep]\nt = 0:3:16\ntemperature = 0.5, 1, 2\n"
    ),
    preset!(
        "fig2a-weak",
        "QSL-to-coherence ratio vs t at weak coupling",
        "[dephasing-ratio]\nlambda = 0.001\n[sweep]\nt = 0:3:16\ntemperature = 0.5, 1, 5\n"
    ),
    preset!(
        "fig2b",
        "QSL ratio, purity and l1 coherence vs t at strong coupling",
        "[dephasing-qsl]\nlambda = 0.2\n[sweep]\nt = 0:3:16\ntemperature = 0.5, 5\n"
    ),
    preset!(
        "fig2c",
        "QSL ratio, purity and l1 coherence vs t at weak coupling",
        "[dephasing-qsl]\nlambda = 0.001\n[sweep]\nt = 0:3:16\ntemperature = 0.5, 5\n"
    ),
    preset!(
        "fig3a",
        "QSL ratio over temperature and coupling at t = 0.1",
        "[dephasing-qsl]\nt = 0.1\n[sweep]\ntemperature = 0.1, 0.5, 1, 2, 5\nlambda = 0.001, 0.01, 0.05, 0.1, 0.2\n"
    ),
    preset!(
        "fig3b",
        "QSL ratio over temperature and coupling at t = 0.5",
        "[dephasing-qsl]\nt = 0.5\n[sweep]\ntemperature = 0.1, 0.5, 1, 2, 5\nlambda = 0.001, 0.01, 0.05, 0.1, 0.2\n"
    ),
    preset!(
        "fig3c",
        "QSL ratio over temperature and coupling at t = 1",
        "[dephasing-qsl]\nt = 1\n[sweep]\ntemperature = 0.1, 0.5, 1, 2, 5\nlambda = 0.001, 0.01, 0.05, 0.1, 0.2\n"
    ),
    preset!(
        "fig3d",
        "QSL ratio over temperature and coupling at t = 1.5",
        "[dephasing-qsl]\nt = 1.5\n[sweep]\ntemperature = 0.1, 0.5, 1, 2, 5\nlambda = 0.001, 0.01, 0.05, 0.1, 0.2\n"
    ),
    preset!(
        "fig4a",
        "sub-Ohmic bath (s = 0.6), strong coupling, QSL ratio vs t and temperature",
        "[dephasing-qsl]\nlambda = 0.2\ns = 0.6\n[sweep]\nt = 0:3:16\ntemperature = 0.5, 1, 5\n"
    ),
    preset!(
        "fig4b",
        "sub-Ohmic bath (s = 0.6), weak coupling, QSL ratio vs t and temperature",
        "[dephasing-qsl]\nlambda = 0.001\ns = 0.6\n[sweep]\nt = 0:3:16\ntemperature = 0.1, 1, 5\n"
    ),
    preset!(
        "fig4c",
        "QSL ratio vs t and Ohmicity at strong coupling, T = 1",
        "[dephasing-qsl]\nlambda = 0.2\n[sweep]\nt = 0:3:7\ns = 0.3:1:8\n"
    ),
    preset!(
        "fig4d",
        "QSL ratio vs t and Ohmicity at weak coupling, T = 1",
        "[dephasing-qsl]\nlambda = 0.001\n[sweep]\nt = 0:3:7\ns = 0.3:1:8\n"
    ),
    preset!(
        "fig5",
        "bang-bang control: QSL ratio vs t for several pulse intervals",
        "[bangbang-qsl]\nlambda = 0.2\nomega_c = 20\n[sweep]\nt = 0:3:16\npulse_interval = 0.05, 0.02, 0.01, 0.005\n"
    ),
    preset!(
        "fig6a",
        "bang-bang control in a sub-Ohmic bath: QSL ratio vs t and temperature",
        "[bangbang-qsl]\nlambda = 0.2\nomega_c = 20\ns = 0.6\npulse_interval = 0.05\n[sweep]\nt = 0:3:16\ntemperature = 0.5, 1, 5\n"
    ),
    preset!(
        "fig6b",
        "bang-bang control: QSL ratio vs t and Ohmicity",
        "[bangbang-qsl]\nlambda = 0.2\nomega_c = 20\npulse_interval = 0.05\n[sweep]\nt = 0:3:16\ns = 0.6, 1, 1.5\n"
    ),
    preset!(
        "fig7",
        "two-qubit hierarchy: qubit-A QSL ratio vs t for several couplings, T = 5",
        "[heom-qsl]\ntemperature = 5\ntau_d = 10\n[sweep]\nt = 0:10:201\nlambda = 0.005, 0.01, 0.02, 0.05\n"
    ),
    preset!(
        "fig8a",
        "two-qubit hierarchy: qubit-A QSL ratio vs t and temperature, weak coupling",
        "[heom-qsl]\nlambda = 0.005\ntau_d = 10\n[sweep]\nt = 0:10:101\ntemperature = 1, 5, 20\n"
    ),
    preset!(
        "fig8b",
        "two-qubit hierarchy: qubit-A QSL ratio vs t and temperature, stronger coupling",
        "[heom-qsl]\nlambda = 0.05\ntau_d = 10\n[sweep]\nt = 0:10:101\ntemperature = 1, 5, 20\n"
    ),
    preset!(
        "fig8c",
        "two-qubit hierarchy: qubit-A coherence vs t and temperature, weak coupling",
        "[heom-coherence]\nlambda = 0.005\n[sweep]\nt = 0:10:101\ntemperature = 1, 5, 20\n"
    ),
    preset!(
        "fig8d",
        "two-qubit hierarchy: qubit-A coherence vs t and temperature, stronger coupling",
        "[heom-coherence]\nlambda = 0.05\n[sweep]\nt = 0:10:101\ntemperature = 1, 5, 20\n"
    ),
    preset!(
        "fig8b-transverse",
        "as fig8b with a transverse qubit-B bath coupling; qubit A becomes temperature dependent",
        "[heom-qsl]\nlambda = 0.05\ntau_d = 10\n[sweep]\nt = 0:10:101\ntemperature = 1, 5, 20\n[numerics]\nheom_coupling = sigma_x_b\n"
    ),
    preset!(
        "fig8d-transverse",
        "as fig8d with a transverse qubit-B bath coupling; qubit A becomes temperature dependent",
        "[heom-coherence]\nlambda = 0.05\n[sweep]\nt = 0:10:101\ntemperature = 1, 5, 20\n[numerics]\nheom_coupling = sigma_x_b\n"
    ),
];

pub fn find(name: &str) -> Option<&'static Preset> {
    PRESETS.iter().find(|p| p.name == name)
}
