from .plots import draw_panel, plot_curves, plot_density, save_svg
