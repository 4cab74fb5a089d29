use std::path::Path;
use std::time::Instant;

use ahe_core::average::simple_average_fill;
use ahe_core::bench::{corrupt as corrupt_image, median_filter, metrics, Synthetic};
use ahe_core::pipeline::{run_ahe, run_plain, run_varcoef_dr};
use ahe_core::{CorruptionMask, PeriodicImage};
use clap::ValueEnum;

use crate::error::{CliError, CliResult};
use crate::io::{read_gray, read_mask, write_gray, write_mask, GrayBytes};
use crate::params::Params;
use crate::{BenchArgs, BenchMethod, CorruptArgs, InpaintArgs, Method};

pub fn corrupt(args: &CorruptArgs) -> CliResult<()> {
    let params = args.params.resolve()?;
    let spec = params.corruption()?;
    let input = read_gray(&args.input)?;
    let (corrupted, mask) = corrupt_image(&input.to_image()?, &spec)?;
    write_gray(&args.output, &GrayBytes::from_image(&corrupted, Some((&input, &mask))))?;
    write_mask(&args.mask, &mask)?;
    println!("fraction={:.6}", mask.bad_fraction());
    Ok(())
}

fn reconstruct(method: Method, f: &PeriodicImage, mask: &CorruptionMask, params: &Params) -> CliResult<PeriodicImage> {
    Ok(match method {
        Method::Plain => {
            let (p, restore) = params.plain()?;
            run_plain(f, mask, &p, restore.as_ref())?
        }
        Method::VarcoefDr => run_varcoef_dr(f, mask, &params.varcoef_dr()?)?,
        Method::Ahe => run_ahe(f, mask, &params.ahe()?)?.output,
    })
}

pub fn inpaint(args: &InpaintArgs) -> CliResult<()> {
    let params = args.params.resolve()?;
    let input = read_gray(&args.input)?;
    let f = input.to_image()?;
    let mask = match &args.mask {
        Some(path) => read_mask(path)?,
        None => CorruptionMask::from_image(&f),
    };
    if mask.size() != f.size() {
        return Err(CliError::usage(format!(
            "mask is {0}x{0} but the image is {1}x{1}",
            mask.size(),
            f.size()
        )));
    }
    let start = Instant::now();
    let output = match (&args.emit_intermediates, args.method) {
        (None, method) => reconstruct(method, &f, &mask, &params)?,
        (Some(dir), Method::Ahe) => {
            let cfg = ahe_core::AheConfig { emit_intermediates: true, ..params.ahe()? };
            let out = run_ahe(&f, &mask, &cfg)?;
            let steps = out.intermediates.as_ref().expect("requested intermediates");
            write_panels(dir, &f, [&steps.g, &steps.grad_mag, &steps.h, &steps.f3], &out.output)?;
            out.output
        }
        (Some(_), _) => return Err(CliError::usage("--emit-intermediates requires --method ahe")),
    };
    write_gray(&args.output, &GrayBytes::from_image(&output, Some((&input, &mask))))?;
    println!("bad_pixels={}", mask.bad_count());
    println!("seconds={:.3}", start.elapsed().as_secs_f64());
    Ok(())
}

fn write_panels(dir: &Path, f: &PeriodicImage, steps: [&PeriodicImage; 4], output: &PeriodicImage) -> CliResult<()> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(format!("cannot create {}: {e}", dir.display())))?;
    let names = ["0-input", "1-average", "2-gradient", "3-smoothed", "4-fused", "5-output"];
    let images = [f, steps[0], steps[1], steps[2], steps[3], output];
    for (name, img) in names.iter().zip(images) {
        write_gray(&dir.join(format!("{name}.pgm")), &GrayBytes::from_image(img, None))?;
    }
    Ok(())
}

pub fn bench(args: &BenchArgs) -> CliResult<()> {
    let params = args.params.resolve()?;
    let spec = params.corruption()?;
    let truth = match (&args.truth, &args.synthetic) {
        (Some(path), _) => read_gray(path)?.to_image()?,
        (None, Some(name)) => Synthetic::ALL
            .into_iter()
            .find(|s| s.name() == name)
            .ok_or_else(|| CliError::usage(format!("unknown synthetic image '{name}'")))?
            .render(args.size),
        (None, None) => return Err(CliError::usage("either --truth or --synthetic is required")),
    };
    let (f, mask) = corrupt_image(&truth, &spec)?;
    let mut report = Vec::new();
    for &method in &args.methods {
        let start = Instant::now();
        let out = match method {
            BenchMethod::Average => simple_average_fill(&f, &mask)?,
            BenchMethod::Median => median_filter(&f, &mask)?,
            BenchMethod::Plain => reconstruct(Method::Plain, &f, &mask, &params)?,
            BenchMethod::VarcoefDr => reconstruct(Method::VarcoefDr, &f, &mask, &params)?,
            BenchMethod::Ahe => reconstruct(Method::Ahe, &f, &mask, &params)?,
        };
        let seconds = start.elapsed().as_secs_f64();
        let name = method.to_possible_value().expect("no skipped variants");
        report.push(metrics(&out, &truth, &mask)?.to_records(name.get_name(), seconds));
    }
    let text = report.join("\n");
    match &args.report {
        Some(path) => {
            std::fs::write(path, text).map_err(|e| CliError::io(format!("cannot write {}: {e}", path.display())))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
