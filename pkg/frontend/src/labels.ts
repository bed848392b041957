/** The seven-way annotation alphabet with reference swatches and the
 * classic scale descriptions shown to annotators during onboarding. */

export interface LabelOption {
  value: string;        // wire value: "I".."VI" | "NA"
  display: string;      // button caption
  swatch: string | null; // reference color, null for N/A
  description: string;
}

export const LABEL_OPTIONS: LabelOption[] = [
  { value: "I",  display: "I",   swatch: "#f4d4c2", description: "Pale white; burns, does not tan" },
  { value: "II", display: "II",  swatch: "#e8b894", description: "White; burns easily, tans minimally" },
  { value: "III", display: "III", swatch: "#d19e7c", description: "Beige; burns, tans gradually" },
  { value: "IV", display: "IV",  swatch: "#bb7750", description: "Brown; burns minimally, tans well" },
  { value: "V",  display: "V",   swatch: "#8d5524", description: "Dark brown; rarely burns, tans darkly" },
  { value: "VI", display: "VI",  swatch: "#5a3825", description: "Black; never burns, deeply pigmented" },
  { value: "NA", display: "N/A", swatch: null, description: "Skin tone not assessable in this image" },
];

export const FLAG_KINDS = ["IncorrectLabel", "InappropriateOrIrrelevant"] as const;
export type FlagKind = (typeof FLAG_KINDS)[number];
