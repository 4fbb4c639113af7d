//! File-format round trips through the filesystem.

use lpf_core::io::{load_cloud_auto, scan_dataset};
use lpf_core::{load_cloud, save_cloud, synthetic, CloudFormat, PointCloud};

fn f32_exact(cloud: &PointCloud) -> PointCloud {
    let pts = cloud
        .points()
        .iter()
        .map(|p| [p[0] as f32 as f64, p[1] as f32 as f64, p[2] as f32 as f64])
        .collect();
    PointCloud::new(pts).unwrap()
}

#[test]
fn pclb_1024_points_write_then_read() {
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("a.pclb");
    let cloud = f32_exact(&synthetic::airplane(1024, 1));
    save_cloud(&cloud, &path, CloudFormat::Pclb).unwrap();
    assert_eq!(std::fs::metadata(&path).unwrap().len(), 8 + 1024 * 12);
    let back = load_cloud(&path, CloudFormat::Pclb).unwrap();
    assert_eq!(back.points(), cloud.points());
}

#[test]
fn every_format_round_trips_f32_values() {
    let tmp = tempfile::tempdir().unwrap();
    let cloud = f32_exact(&synthetic::cube_surface(257, 0.75, 3));
    for fmt in [CloudFormat::Xyz, CloudFormat::Ply, CloudFormat::Off, CloudFormat::Pclb] {
        let path = tmp.path().join(format!("c.{}", fmt.extension()));
        save_cloud(&cloud, &path, fmt).unwrap();
        // text formats keep nine significant digits, enough to recover every f32
        let back = f32_exact(&load_cloud_auto(&path).unwrap());
        assert_eq!(back.points(), cloud.points(), "{fmt:?}");
    }
}

#[test]
fn scan_labels_and_sorts() {
    let tmp = tempfile::tempdir().unwrap();
    let root = tmp.path();
    let cloud = synthetic::sphere_antipodal(4, 0);
    std::fs::create_dir_all(root.join("b")).unwrap();
    std::fs::create_dir_all(root.join("a/deep")).unwrap();
    save_cloud(&cloud, root.join("b/x.xyz"), CloudFormat::Xyz).unwrap();
    save_cloud(&cloud, root.join("a/deep/y.ply"), CloudFormat::Ply).unwrap();
    save_cloud(&cloud, root.join("top.off"), CloudFormat::Off).unwrap();
    std::fs::write(root.join("b/readme.md"), "not a cloud").unwrap();
    let entries = scan_dataset(root).unwrap();
    let rel: Vec<_> = entries.iter().map(|e| e.relative.as_str()).collect();
    assert_eq!(rel, ["a/deep/y.ply", "b/x.xyz", "top.off"]);
    assert_eq!(entries[0].label.as_deref(), Some("deep"));
    assert_eq!(entries[2].label, None);
    assert_eq!(entries[1].load().unwrap().label(), Some("b"));
}

#[test]
fn missing_file_is_an_io_error() {
    let err = load_cloud("/nonexistent/x.xyz", CloudFormat::Xyz).unwrap_err();
    assert!(err.is_io());
}
