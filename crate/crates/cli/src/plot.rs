//! Static PNG plots: training loss curves, per-fold metric bars, and the
//! detect command's timeline strip.
//!
//! Everything is drawn on the library's own framebuffer (dark background,
//! bright polylines, 5×7 bitmap font) so plot output is as deterministic as
//! the numbers behind it.

use imu_movie::data::ActivityClass;
use imu_movie::localize::LocalizedEvent;
use imu_movie::model::{EpochStats, TimelinePrediction};
use imu_movie::render::font::{draw_text, text_width};
use imu_movie::render::Pixmap;

const BACKGROUND: [u8; 3] = [14, 14, 14];
const GRID: [u8; 3] = [55, 55, 55];
const AXIS: [u8; 3] = [140, 140, 140];
const TEXT: [u8; 3] = [200, 200, 200];
const TRAIN_COLOR: [u8; 3] = [255, 120, 70];
const VAL_COLOR: [u8; 3] = [90, 220, 90];
const BAR_COLORS: [[u8; 3]; 4] =
    [[90, 160, 255], [250, 210, 80], [90, 220, 90], [255, 90, 90]];
const BAR_NAMES: [&str; 4] = ["ACC", "PREC", "REC", "FPR"];

/// Train/validation loss per epoch, with the kept epoch marked.
pub fn loss_curves(history: &[EpochStats], best_epoch: usize) -> Pixmap {
    let (width, height) = (640usize, 400usize);
    let (left, right, top, bottom) = (52i64, 16i64, 28i64, 36i64);
    let mut pm = Pixmap::new(width, height);
    pm.fill(BACKGROUND);

    let plot_w = width as i64 - left - right;
    let plot_h = height as i64 - top - bottom;
    let max_loss = history
        .iter()
        .flat_map(|e| [e.train_loss, e.val_loss])
        .fold(0.0_f64, f64::max)
        .max(1e-9);
    let epochs = history.len().max(2) as f64;

    let x_of = |epoch: usize| left + ((epoch as f64 - 1.0) / (epochs - 1.0) * plot_w as f64) as i64;
    let y_of = |loss: f64| top + plot_h - (loss / (max_loss * 1.05) * plot_h as f64) as i64;

    for g in 1..=4 {
        let y = top + plot_h * g / 5;
        pm.draw_line_rgb(left, y, left + plot_w, y, GRID);
        let value = max_loss * 1.05 * (1.0 - g as f64 / 5.0);
        draw_text(&mut pm, 4, y - 3, &format!("{value:.2}"), TEXT);
    }
    pm.draw_line_rgb(left, top, left, top + plot_h, AXIS);
    pm.draw_line_rgb(left, top + plot_h, left + plot_w, top + plot_h, AXIS);

    for pair in history.windows(2) {
        let (a, b) = (&pair[0], &pair[1]);
        pm.draw_line_rgb(x_of(a.epoch), y_of(a.train_loss), x_of(b.epoch), y_of(b.train_loss), TRAIN_COLOR);
        pm.draw_line_rgb(x_of(a.epoch), y_of(a.val_loss), x_of(b.epoch), y_of(b.val_loss), VAL_COLOR);
    }
    if let Some(best) = history.iter().find(|e| e.epoch == best_epoch) {
        let (x, y) = (x_of(best.epoch), y_of(best.val_loss));
        pm.draw_line_rgb(x - 3, y - 3, x + 3, y + 3, TEXT);
        pm.draw_line_rgb(x - 3, y + 3, x + 3, y - 3, TEXT);
    }
    for e in history {
        let x = x_of(e.epoch);
        pm.draw_line_rgb(x, top + plot_h, x, top + plot_h + 3, AXIS);
    }

    draw_text(&mut pm, left, 8, "LOSS BY EPOCH", TEXT);
    let legend_x = width as i64 - 200;
    pm.draw_line_rgb(legend_x, 11, legend_x + 14, 11, TRAIN_COLOR);
    draw_text(&mut pm, legend_x + 18, 8, "TRAIN", TEXT);
    pm.draw_line_rgb(legend_x + 70, 11, legend_x + 84, 11, VAL_COLOR);
    draw_text(&mut pm, legend_x + 88, 8, "VAL X=KEPT", TEXT);
    draw_text(&mut pm, left + plot_w / 2 - 18, height as i64 - 12, "EPOCH", TEXT);
    pm
}

/// One fold's bar heights; `None` draws no bar (undefined ratio).
pub struct FoldBars {
    pub label: String,
    pub values: [Option<f64>; 4],
}

/// Grouped accuracy/precision/recall/FPR bars, one group per fold.
pub fn fold_bars(bars: &[FoldBars]) -> Pixmap {
    let (bar_w, gap, group_pad) = (10i64, 2i64, 14i64);
    let group_w = 4 * bar_w + 3 * gap + group_pad;
    let (left, right, top, bottom) = (52i64, 16i64, 28i64, 40i64);
    let width = (left + right + group_w * bars.len().max(1) as i64) as usize;
    let height = 360usize;
    let mut pm = Pixmap::new(width.max(320), height);
    pm.fill(BACKGROUND);

    let plot_h = height as i64 - top - bottom;
    let y_of = |v: f64| top + plot_h - (v.clamp(0.0, 1.0) * plot_h as f64) as i64;

    for g in 0..=4 {
        let v = g as f64 / 4.0;
        let y = y_of(v);
        pm.draw_line_rgb(left, y, pm.width() as i64 - right, y, GRID);
        draw_text(&mut pm, 4, y - 3, &format!("{v:.2}"), TEXT);
    }

    for (i, fold) in bars.iter().enumerate() {
        let group_x = left + group_w * i as i64 + group_pad / 2;
        for (slot, value) in fold.values.iter().enumerate() {
            let Some(v) = *value else { continue };
            let x0 = group_x + slot as i64 * (bar_w + gap);
            let y = y_of(v);
            for x in x0..x0 + bar_w {
                pm.draw_line_rgb(x, y, x, top + plot_h, BAR_COLORS[slot]);
            }
        }
        let lx = group_x + (4 * bar_w + 3 * gap) / 2 - text_width(&fold.label) as i64 / 2;
        draw_text(&mut pm, lx, height as i64 - bottom + 8, &fold.label, TEXT);
    }
    pm.draw_line_rgb(left, top + plot_h, pm.width() as i64 - right, top + plot_h, AXIS);

    let mut x = left;
    for (slot, name) in BAR_NAMES.iter().enumerate() {
        pm.draw_line_rgb(x, 11, x + 10, 11, BAR_COLORS[slot]);
        draw_text(&mut pm, x + 14, 8, name, TEXT);
        x += 14 + text_width(name) as i64 + 16;
    }
    pm
}

/// Truth vs. prediction strip for one recording: three lanes (ground-truth
/// pickups, classified windows, localized events) plus contact ticks.
pub fn timeline_strip(
    duration_ms: i64,
    truth_pickups: &[(i64, i64)],
    predictions: &[TimelinePrediction],
    events: &[LocalizedEvent],
    contacts: &[i64],
) -> Pixmap {
    let (width, height) = (640usize, 170usize);
    let (left, right) = (60i64, 12i64);
    let lanes = [("TRUTH", 36i64), ("FRAMES", 72), ("EVENTS", 108)];
    let lane_h = 22i64;
    let mut pm = Pixmap::new(width, height);
    pm.fill(BACKGROUND);

    let span = duration_ms.max(1) as f64;
    let plot_w = (width as i64 - left - right) as f64;
    let x_of = |t: i64| left + (t as f64 / span * plot_w) as i64;

    for sec in 0..=duration_ms / 1000 {
        let x = x_of(sec * 1000);
        pm.draw_line_rgb(x, 28, x, 140, GRID);
        if sec % 10 == 0 {
            draw_text(&mut pm, x - 6, 146, &format!("{sec}"), TEXT);
        }
    }
    draw_text(&mut pm, left, 8, "PICKUP TIMELINE (SECONDS)", TEXT);

    for (name, y) in lanes {
        draw_text(&mut pm, 4, y + lane_h / 2 - 3, name, TEXT);
        pm.draw_line_rgb(left, y + lane_h, width as i64 - right, y + lane_h, AXIS);
    }

    for &(start, end) in truth_pickups {
        fill_span(&mut pm, x_of(start), x_of(end), lanes[0].1, lane_h, VAL_COLOR);
    }
    for p in predictions {
        if p.class == ActivityClass::Pickup {
            let x = x_of(p.t0_ms);
            pm.draw_line_rgb(x, lanes[1].1, x, lanes[1].1 + lane_h - 1, BAR_COLORS[0]);
        }
    }
    for e in events {
        fill_span(&mut pm, x_of(e.start_ms), x_of(e.end_ms + 10), lanes[2].1, lane_h, TRAIN_COLOR);
    }
    for &c in contacts {
        let x = x_of(c);
        pm.draw_line_rgb(x, 24, x, 32, TEXT);
    }
    pm
}

fn fill_span(pm: &mut Pixmap, x0: i64, x1: i64, y: i64, h: i64, rgb: [u8; 3]) {
    for x in x0..=x1.max(x0) {
        pm.draw_line_rgb(x, y, x, y + h - 1, rgb);
    }
}
