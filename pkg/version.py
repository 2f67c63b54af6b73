APP_NAME = "Laplace Panels"
APP_VERSION = "0.1.0"
APP_AUTHOR = "Priyanshu"
APP_DESCRIPTION = "Analytical Galerkin BEM integrals of the Laplace kernel over flat triangles"
