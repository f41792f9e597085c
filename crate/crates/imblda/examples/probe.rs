// scratch probe: oracle tau sweep for msplit-diag on setting i (50,10,1000)
use imblda::classifiers::fit_msplit_hr_diag;
use imblda::datagen::{make_setting, sample_dataset, SettingId};
use imblda::eval::theoretical_mcr;
use imblda::seed::stream_rng;

fn main() {
    let model = make_setting(SettingId::I, 1000).unwrap();
    let reps = 60;
    for tau in [1.5f64, 2.0, 2.5, 3.0, 3.25, 3.5, 3.75, 4.0, 4.5, 5.0] {
        let (mut m1, mut m2, mut sel) = (0.0, 0.0, 0.0);
        for r in 0..reps {
            let d = sample_dataset(&model, 50, 10, &mut stream_rng(7, &[0, r])).unwrap();
            let (rule, trace) = fit_msplit_hr_diag(&d, tau, 30, &mut stream_rng(7, &[1, r])).unwrap();
            let (a, b) = theoretical_mcr(&rule, &model).unwrap();
            m1 += a; m2 += b; sel += trace.mean_selected();
        }
        let n = reps as f64;
        println!("tau {tau:4.2}: mcr1 {:5.2}% mcr2 {:5.2}% mean-selected {:6.2}", 100.0*m1/n, 100.0*m2/n, sel/n);
    }
}
