#pragma once

#define STRATLASSO_VERSION "0.1.0"
